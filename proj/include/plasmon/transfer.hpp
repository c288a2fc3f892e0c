#pragma once
// D/F matrices (C with the evanescent +-i factors) and the 4x4-block transfer
// matrix linking incoming and outgoing SPP and radiation amplitudes.
//
// Input order:  [A^f_TM, B^b_TM, A^f_TE, B^b_TE]
// Output order: [A^b_TM, B^f_TM, A^b_TE, B^f_TE]
// Each block has length N+2 with slot 0 the SPP (TM) or the structural zero (TE).

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include "plasmon/coupling.hpp"

namespace plasmon {

class SingularBracketError : public std::runtime_error {
 public:
  SingularBracketError(const std::string& what, double rcond)
      : std::runtime_error(what + " (reciprocal condition estimate " + std::to_string(rcond) + ")"),
        rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

/// Which propagation constant decides the sign of the evanescent factor.
/// total_k keys on the full wavenumber k (q below the bulk light line); k_x
/// keys on the interface-normal component.
enum class RealityKey { total_k, k_x };

struct DFMatrices {
  Eigen::MatrixXcd D_tmtm, D_tmte, D_tete;
  Eigen::MatrixXcd F_tmtm, F_tmte, F_tete;
  // D_TETM and F_TETM vanish identically and are not stored.
};

inline DFMatrices build_DF(const CBlocks& C, const CouplingContext& ctx, const ModeGrid& grid,
                           RealityKey key = RealityKey::total_k) {
  DFMatrices d{C.tmtm, C.tmte, C.tete, C.tmtm, C.tmte, C.tete};
  auto real_flag = [key](const RadiationKinematics& r) {
    return key == RealityKey::total_k ? r.k_real : r.propagating;
  };
  const cplx I(0.0, 1.0);
  for (int n = grid.mmax_i; n < grid.size(); ++n) {
    const cplx f = real_flag(ctx.i.nodes[n].kin) ? I : -I;
    d.D_tmtm.col(n + 1) *= f;
    d.D_tmte.col(n + 1) *= -f;
    d.D_tete.col(n + 1) *= -f;
  }
  for (int m = grid.mmax_j; m < grid.size(); ++m) {
    const cplx f = real_flag(ctx.j.nodes[m].kin) ? I : -I;
    d.F_tmtm.row(m + 1) *= f;
    d.F_tmte.row(m + 1) *= f;
    d.F_tete.row(m + 1) *= -f;
  }
  return d;
}

struct TransferMatrix {
  std::array<std::array<Eigen::MatrixXcd, 4>, 4> blocks;  // blocks[r][c] = T_{r+1,c+1}
  ModeGrid grid;

  const Eigen::MatrixXcd& operator()(int r, int c) const { return blocks.at(r - 1).at(c - 1); }
  Eigen::MatrixXcd& operator()(int r, int c) { return blocks.at(r - 1).at(c - 1); }
  int block_size() const { return static_cast<int>(blocks[0][0].rows()); }

  Eigen::MatrixXcd dense() const {
    const int n = block_size();
    Eigen::MatrixXcd T(4 * n, 4 * n);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) T.block(r * n, c * n, n, n) = blocks[r][c];
    return T;
  }
};

namespace detail {

inline Eigen::PartialPivLU<Eigen::MatrixXcd> checked_lu(const Eigen::MatrixXcd& M, const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) throw SingularBracketError(what, rc);
  return lu;
}

}  // namespace detail

/// Closed-form block elimination. All (...)^{-1} M products are linear solves.
inline TransferMatrix assemble_T(const DFMatrices& df, const ModeGrid& grid = {}) {
  using Eigen::MatrixXcd;
  const int n = static_cast<int>(df.D_tmtm.rows());
  const MatrixXcd Id = MatrixXcd::Identity(n, n);
  const MatrixXcd Dm = df.D_tmtm.transpose();
  const MatrixXcd De = df.D_tmte.transpose();
  const MatrixXcd Dt = df.D_tete.transpose();
  const MatrixXcd Fm = df.F_tmtm.conjugate();
  const MatrixXcd Fe = df.F_tmte.conjugate();
  const MatrixXcd Ft = df.F_tete.conjugate();

  const MatrixXcd P = Dm * Fm;
  const auto luQ = detail::checked_lu(Id + P, "singular TM bracket (1 + D^T F*)");
  const MatrixXcd QDm = luQ.solve(Dm);         // Q D^T_TMTM
  const MatrixXcd QPmI = luQ.solve(P - Id);    // Q (P - 1)
  const MatrixXcd DeFm = De * Fm;
  const MatrixXcd DmFe = Dm * Fe;

  const MatrixXcd bracket = Id + De * Fe + Dt * Ft - DeFm * QDm * Fe;
  const auto luX = detail::checked_lu(bracket, "singular TE bracket chi^{-1}");

  TransferMatrix T;
  T.grid = grid;
  T(3, 1) = luX.solve(DeFm * QPmI - DeFm);
  T(3, 2) = luX.solve(2.0 * DeFm * QDm - 2.0 * De);
  T(3, 3) = luX.solve(Id - De * Fe - Dt * Ft + DeFm * QDm * Fe);
  T(3, 4) = luX.solve(2.0 * Dt);

  T(4, 1) = Ft * T(3, 1);
  T(4, 2) = Ft * T(3, 2);
  T(4, 3) = Ft * (Id + T(3, 3));
  T(4, 4) = Ft * T(3, 4) - Id;

  T(1, 1) = luQ.solve(P - Id + DmFe * T(3, 1));
  T(1, 2) = luQ.solve(2.0 * Dm + DmFe * T(3, 2));
  T(1, 3) = luQ.solve(DmFe * (Id + T(3, 3)));
  T(1, 4) = luQ.solve(DmFe * T(3, 4));

  T(2, 1) = Fm * (Id - T(1, 1)) + Fe * T(3, 1);
  T(2, 2) = Id + Fe * T(3, 2) - Fm * T(1, 2);
  // Eliminating A^f_TE gives the (1 + T33) factor here.
  T(2, 3) = Fe * (Id + T(3, 3)) - Fm * T(1, 3);
  T(2, 4) = Fe * T(3, 4) - Fm * T(1, 4);
  return T;
}

/// Column 0 of the output blocks, i.e. the response to a unit SPP incident
/// from side i. Same elimination as assemble_T restricted to one input, which
/// avoids most of the dense products.
struct SppResponse {
  std::array<Eigen::VectorXcd, 4> out;  // [A^b_TM, B^f_TM, A^b_TE, B^f_TE]
  ModeGrid grid;
};

inline SppResponse spp_response(const DFMatrices& df, const ModeGrid& grid = {}) {
  using Eigen::MatrixXcd;
  using Eigen::VectorXcd;
  const int n = static_cast<int>(df.D_tmtm.rows());
  const MatrixXcd Id = MatrixXcd::Identity(n, n);
  const MatrixXcd Dm = df.D_tmtm.transpose();
  const MatrixXcd De = df.D_tmte.transpose();
  const MatrixXcd Dt = df.D_tete.transpose();
  const MatrixXcd Fm = df.F_tmtm.conjugate();
  const MatrixXcd Fe = df.F_tmte.conjugate();
  const MatrixXcd Ft = df.F_tete.conjugate();

  const MatrixXcd P = Dm * Fm;
  const auto luQ = detail::checked_lu(Id + P, "singular TM bracket (1 + D^T F*)");
  const MatrixXcd G = luQ.solve(Dm * Fe);
  const MatrixXcd bracket = Id + De * (Fe - Fm * G) + Dt * Ft;
  const auto luX = detail::checked_lu(bracket, "singular TE bracket chi^{-1}");

  VectorXcd x = VectorXcd::Zero(n);
  x(0) = 1.0;
  const VectorXcd Px = P.col(0);
  const VectorXcd Fmx = Fm.col(0);
  const VectorXcd qpx = luQ.solve(Px - x);

  SppResponse r;
  r.grid = grid;
  r.out[2] = luX.solve(De * (Fm * qpx) - De * Fmx);
  r.out[3] = Ft * r.out[2];
  r.out[0] = luQ.solve(Px - x + Dm * (Fe * r.out[2]));
  r.out[1] = Fm * (x - r.out[0]) + Fe * r.out[2];
  return r;
}

inline SppResponse spp_response(const InterfaceSpec& spec, RealityKey key = RealityKey::total_k) {
  const ModeGrid grid = build_grid(spec);
  const CouplingContext ctx = make_context(spec, grid);
  return spp_response(build_DF(build_C_blocks(grid, ctx), ctx, grid, key), grid);
}

struct BlockLayout {
  std::array<Eigen::VectorXcd, 4> v;  // [A_TM, B_TM, A_TE, B_TE]

  static BlockLayout zeros(int n) {
    BlockLayout b;
    for (auto& x : b.v) x = Eigen::VectorXcd::Zero(n);
    return b;
  }
};

/// Outgoing amplitudes for the given incoming ones. The TE slot 0 carries no
/// mode, so its output is pinned to zero.
inline BlockLayout scatter(const TransferMatrix& T, const BlockLayout& in) {
  const int n = T.block_size();
  for (const auto& x : in.v)
    if (x.size() != n) throw std::invalid_argument("scatter: block length mismatch");
  if (in.v[2](0) != cplx(0.0) || in.v[3](0) != cplx(0.0))
    throw std::invalid_argument("scatter: TE slot 0 must be zero");
  BlockLayout out = BlockLayout::zeros(n);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out.v[r] += T.blocks[r][c] * in.v[c];
  out.v[2](0) = 0.0;
  out.v[3](0) = 0.0;
  return out;
}

/// Full pipeline for one configuration.
inline TransferMatrix transfer_matrix(const InterfaceSpec& spec, RealityKey key = RealityKey::total_k) {
  const ModeGrid grid = build_grid(spec);
  const CouplingContext ctx = make_context(spec, grid);
  const CBlocks C = build_C_blocks(grid, ctx);
  return assemble_T(build_DF(C, ctx, grid, key), grid);
}

/// Binary snapshot: int32 block size n, then the 16 blocks T11, T12, ..., T44,
/// each row-major as (re, im) float64 pairs, little-endian.
inline void dump_binary(const TransferMatrix& T, const std::string& path) {
  static_assert(sizeof(double) == 8 && std::endian::native == std::endian::little);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  const std::int32_t n = T.block_size();
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (const auto& row : T.blocks)
    for (const auto& B : row)
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const double re = B(r, c).real(), im = B(r, c).imag();
          os.write(reinterpret_cast<const char*>(&re), 8);
          os.write(reinterpret_cast<const char*>(&im), 8);
        }
}

inline TransferMatrix load_binary(const std::string& path) {
  static_assert(std::endian::native == std::endian::little);
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::int32_t n = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!is || n <= 0) throw std::runtime_error("bad transfer-matrix header in " + path);
  TransferMatrix T;
  for (auto& row : T.blocks)
    for (auto& B : row) {
      B.resize(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          double re = 0.0, im = 0.0;
          is.read(reinterpret_cast<char*>(&re), 8);
          is.read(reinterpret_cast<char*>(&im), 8);
          B(r, c) = cplx(re, im);
        }
    }
  if (!is) throw std::runtime_error("truncated transfer-matrix file " + path);
  return T;
}

}  // namespace plasmon
