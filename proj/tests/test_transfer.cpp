#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace plasmon;
using Eigen::MatrixXcd;

namespace {

struct Pipeline {
  ModeGrid grid;
  CouplingContext ctx;
  CBlocks C;
  explicit Pipeline(const InterfaceSpec& s) : grid(build_grid(s)), ctx(make_context(s, grid)), C(build_C_blocks(grid, ctx)) {}
};

/// Solves the matching equations as one dense system. Unknowns are the outgoing
/// [A^b_TM, A^b_TE, B^f_TM, B^f_TE]; TE amplitudes enter with a minus sign.
TransferMatrix direct_solve(const DFMatrices& df) {
  const int n = static_cast<int>(df.D_tmtm.rows());
  const MatrixXcd Z = MatrixXcd::Zero(n, n);
  MatrixXcd D(2 * n, 2 * n), F(2 * n, 2 * n);
  D << df.D_tmtm, df.D_tmte, Z, df.D_tete;
  F << df.F_tmtm, df.F_tmte, Z, df.F_tete;
  MatrixXcd S = MatrixXcd::Identity(2 * n, 2 * n);
  S.bottomRightCorner(n, n) *= -1.0;
  const MatrixXcd I = MatrixXcd::Identity(2 * n, 2 * n);
  MatrixXcd M(4 * n, 4 * n), N(4 * n, 4 * n);
  M << S, -D.transpose(), F.conjugate() * S, I;
  N << -I, D.transpose() * S, F.conjugate(), S;
  const MatrixXcd T = M.partialPivLu().solve(N);
  // Reorder from [TM_i, TE_i, TM_j, TE_j] to [TM_i, TM_j, TE_i, TE_j].
  const int perm[4] = {0, 2, 1, 3};
  TransferMatrix out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out.blocks[r][c] = T.block(perm[r] * n, perm[c] * n, n, n);
  return out;
}

double max_block_diff(const TransferMatrix& a, const TransferMatrix& b) {
  double d = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) d = std::max(d, (a.blocks[r][c] - b.blocks[r][c]).cwiseAbs().maxCoeff());
  return d;
}

MatrixXcd random_block(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g;
  MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = scale * cplx(g(rng), g(rng));
  return m;
}

CBlocks perturbed(const CBlocks& C, std::mt19937_64& rng, double scale) {
  const int n = static_cast<int>(C.tmtm.rows());
  CBlocks P = C;
  P.tmtm += random_block(rng, n, scale);
  P.tmte += random_block(rng, n, scale);
  P.tete += random_block(rng, n, scale);
  P.tmte.col(0).setZero();
  P.tete.row(0).setZero();
  P.tete.col(0).setZero();
  return P;
}

}  // namespace

TEST_CASE("closed-form block elimination matches a direct solve", "[transfer]") {
  for (const auto& spec : {testing::silver_spec(1.5, 1.0, 1500, 40.0, 30), testing::silver_spec(1.0, 2.5, 790, 10.0, 30),
                           testing::silver_spec(2.0, 1.2, 790, 0.0, 24)}) {
    const Pipeline p(spec);
    const auto df = build_DF(p.C, p.ctx, p.grid);
    const auto Ta = assemble_T(df, p.grid);
    const auto Td = direct_solve(df);
    double scale = 1.0;
    for (const auto& row : Td.blocks)
      for (const auto& B : row) scale = std::max(scale, B.cwiseAbs().maxCoeff());
    CHECK(max_block_diff(Ta, Td) < 1e-9 * scale);
  }
}

TEST_CASE("elimination stays exact for perturbed couplings", "[transfer]") {
  std::mt19937_64 rng(11);
  const Pipeline p(testing::silver_spec(1.5, 1.0, 1500, 40.0, 24));
  for (int trial = 0; trial < 5; ++trial) {
    const auto df = build_DF(perturbed(p.C, rng, 0.05), p.ctx, p.grid);
    const auto Ta = assemble_T(df, p.grid);
    const auto Td = direct_solve(df);
    CHECK(max_block_diff(Ta, Td) < 1e-8);
  }
}

TEST_CASE("vanishing couplings decouple the two sides", "[transfer]") {
  const int n = 6;
  const MatrixXcd Z = MatrixXcd::Zero(n, n), I = MatrixXcd::Identity(n, n);
  const DFMatrices df{Z, Z, Z, Z, Z, Z};
  const auto T = assemble_T(df);
  CHECK((T(4, 4) + I).norm() < 1e-15);
  CHECK((T(1, 1) + I).norm() < 1e-15);
  CHECK((T(2, 2) - I).norm() < 1e-15);
  CHECK((T(3, 3) - I).norm() < 1e-15);
  for (auto [r, c] : {std::pair{2, 1}, {1, 2}, {3, 1}, {3, 4}, {4, 1}, {1, 3}, {2, 4}})
    CHECK(T(r, c).norm() < 1e-15);
}

TEST_CASE("singular brackets are reported", "[transfer]") {
  const int n = 4;
  const MatrixXcd Z = MatrixXcd::Zero(n, n), I = MatrixXcd::Identity(n, n);
  const DFMatrices df{-I, Z, Z, I, Z, Z};
  CHECK_THROWS_AS(assemble_T(df), SingularBracketError);
  CHECK_THROWS_AS(spp_response(df), SingularBracketError);
  try {
    assemble_T(df);
  } catch (const SingularBracketError& e) {
    CHECK(e.rcond() <= 1e-14);
  }
}

TEST_CASE("single-column response equals column 0 of the full matrix", "[transfer]") {
  for (const auto& spec : {testing::silver_spec(1.5, 1.0, 1500, 30.0, 40), testing::silver_spec(1.0, 3.0, 790, 5.0, 40)}) {
    const Pipeline p(spec);
    const auto df = build_DF(p.C, p.ctx, p.grid);
    const auto T = assemble_T(df, p.grid);
    const auto r = spp_response(df, p.grid);
    for (int b = 0; b < 4; ++b) CHECK((r.out[b] - T.blocks[b][0].col(0)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("identical sides transmit the SPP unchanged", "[transfer]") {
  for (double lam : {790.0, 1500.0})
    for (double th : {0.0, 35.0})
      for (auto key : {RealityKey::total_k, RealityKey::k_x}) {
        const auto r = spp_response(testing::silver_spec(1.0, 1.0, lam, th, 60), key);
        CHECK(std::abs(r.out[1](0) - 1.0) < 1e-10);
        CHECK(r.out[0].cwiseAbs().maxCoeff() < 1e-10);
        CHECK(r.out[2].cwiseAbs().maxCoeff() < 1e-10);
        CHECK(r.out[3].cwiseAbs().maxCoeff() < 1e-10);
        CHECK(r.out[1].tail(r.out[1].size() - 1).cwiseAbs().maxCoeff() < 1e-10);
      }
}

TEST_CASE("reality keys agree at normal incidence", "[transfer]") {
  const auto spec = testing::silver_spec(2.0, 1.0, 790, 0.0, 60);
  const auto a = spp_response(spec, RealityKey::total_k);
  const auto b = spp_response(spec, RealityKey::k_x);
  for (int k = 0; k < 4; ++k) CHECK((a.out[k] - b.out[k]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("propagating power balance is structural", "[transfer]") {
  // Conservation follows from the shape of the elimination, not from the
  // physics of C: arbitrary couplings still balance.
  std::mt19937_64 rng(3);
  const Pipeline p(testing::silver_spec(1.5, 1.0, 1500, 20.0, 40));
  const auto exact = forward_coefficients(spp_response(build_DF(p.C, p.ctx, p.grid), p.grid));
  CHECK(exact.tau + exact.rho + exact.sigma == Catch::Approx(1.0).margin(1e-3));
  for (int trial = 0; trial < 3; ++trial) {
    const auto f = forward_coefficients(spp_response(build_DF(perturbed(p.C, rng, 0.05), p.ctx, p.grid), p.grid));
    INFO("tau " << f.tau << " rho " << f.rho << " sigma " << f.sigma);
    CHECK(f.tau + f.rho + f.sigma == Catch::Approx(1.0).margin(1e-3));
  }
}

TEST_CASE("reference transmission, reflection and loss values", "[transfer]") {
  struct Ref {
    double edi, edj, lam, th;
    double tau, rho, sigma, sigma_te;
    int mi, mj;
  };
  // Independent reference implementation, 200 quadrature nodes.
  const Ref refs[] = {
      {3.0, 1.0, 790, 0.0, 0.6922852014057694, 0.055852182893150464, 0.2518626157010793, 0.0, 73, 54},
      {1.5, 1.0, 1500, 30.0, 0.9389655815548892, 0.021033260291611372, 0.0400011581534993, 0.0008939192488435722, 40, 34},
      {1.4306, 1.0, 1500, 56.0, 0.4845829842657634, 0.49968959093104937, 0.015727424803187236, 0.00905958904173153, 32, 10},
      {2.0, 1.0, 790, 20.0, 0.8473938600781176, 0.03812075246360238, 0.1144853874582805, 0.009931261396109704, 63, 50},
  };
  for (const auto& r : refs) {
    const auto spec = testing::silver_spec(r.edi, r.edj, r.lam, r.th, 200);
    const auto resp = spp_response(spec);
    const auto f = forward_coefficients(resp);
    INFO("eps " << r.edi << "/" << r.edj << " lambda " << r.lam << " theta " << r.th);
    CHECK(resp.grid.mmax_i == r.mi);
    CHECK(resp.grid.mmax_j == r.mj);
    CHECK(f.tau == Catch::Approx(r.tau).margin(1e-8));
    CHECK(f.rho == Catch::Approx(r.rho).margin(1e-8));
    CHECK(f.sigma == Catch::Approx(r.sigma).margin(1e-8));
    CHECK(f.sigma_te == Catch::Approx(r.sigma_te).margin(1e-8));
  }
}

TEST_CASE("scatter applies the blocks and validates its input", "[transfer]") {
  const auto spec = testing::silver_spec(1.5, 1.0, 1500, 25.0, 30);
  const auto T = transfer_matrix(spec);
  const int n = T.block_size();
  auto in = BlockLayout::zeros(n);
  in.v[0](0) = 1.0;
  const auto out = scatter(T, in);
  const auto r = spp_response(spec);
  for (int b = 0; b < 4; ++b) CHECK((out.v[b] - r.out[b]).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(out.v[2](0) == cplx(0.0));

  auto bad = BlockLayout::zeros(n);
  bad.v[3](0) = 1.0;
  CHECK_THROWS_AS(scatter(T, bad), std::invalid_argument);
  auto short_in = BlockLayout::zeros(n);
  short_in.v[1] = Eigen::VectorXcd::Zero(n - 1);
  CHECK_THROWS_AS(scatter(T, short_in), std::invalid_argument);
}

TEST_CASE("binary snapshot round trip", "[transfer]") {
  const auto T = transfer_matrix(testing::silver_spec(1.5, 1.0, 1500, 25.0, 12));
  const auto path = (std::filesystem::temp_directory_path() / "plasmon_T_roundtrip.bin").string();
  dump_binary(T, path);
  CHECK(std::filesystem::file_size(path) == 4 + 16 * 13 * 13 * 16);
  const auto L = load_binary(path);
  CHECK(L.block_size() == T.block_size());
  CHECK(max_block_diff(L, T) == 0.0);
  CHECK((L.dense() - T.dense()).norm() == 0.0);

  std::filesystem::resize_file(path, 100);
  CHECK_THROWS_AS(load_binary(path), std::runtime_error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_binary(path), std::runtime_error);
}
