// Copyright 2026 The RAGE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rage/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "rage/chain.hpp"

namespace rage {

std::string to_string(UpdateKind kind) {
  switch (kind) {
    case UpdateKind::kMps:
      return "mps";
    case UpdateKind::kPhase:
      return "phase";
    case UpdateKind::kRotation:
      return "rotation";
    case UpdateKind::kGradient:
      return "gradient";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<Chain> norm_chain(int n_sites) {
  return {Chain{1.0, false,
                std::vector<SiteCoefficients>(n_sites, identity_coefficients())}};
}

// A_k = Q R with Q left-orthonormal; R moves into site k+1. The state is
// unchanged and the norm environment of the next site becomes better
// conditioned. Skipped when the shapes do not allow a square R.
void shift_gauge_right(MpsTensorSet& mps, int site) {
  if (site + 1 >= mps.n_sites()) return;
  const int dl = mps.left_dim(site);
  const int dr = mps.right_dim(site);
  if (2 * dl < dr) return;
  Mat stacked(2 * dl, dr);
  stacked << mps.tensor(site, 0), mps.tensor(site, 1);
  Eigen::HouseholderQR<Mat> qr(stacked);
  const Mat q = qr.householderQ() * Mat::Identity(2 * dl, dr);
  const Mat r = q.adjoint() * stacked;
  mps.set_tensor(site, 0, q.topRows(dl));
  mps.set_tensor(site, 1, q.bottomRows(dl));
  for (int s = 0; s < 2; ++s) {
    mps.set_tensor(site + 1, s, r * mps.tensor(site + 1, s));
  }
}

// Mirror image: A_k = L Q with Q right-orthonormal; L moves into site k-1.
void shift_gauge_left(MpsTensorSet& mps, int site) {
  if (site == 0) return;
  const int dl = mps.left_dim(site);
  const int dr = mps.right_dim(site);
  if (2 * dr < dl) return;
  Mat wide(dl, 2 * dr);
  wide << mps.tensor(site, 0), mps.tensor(site, 1);
  const Mat tall = wide.adjoint();
  Eigen::HouseholderQR<Mat> qr(tall);
  const Mat q = qr.householderQ() * Mat::Identity(2 * dr, dl);
  const Mat l = wide * q;
  const Mat qa = q.adjoint();
  mps.set_tensor(site, 0, qa.leftCols(dr));
  mps.set_tensor(site, 1, qa.rightCols(dr));
  for (int s = 0; s < 2; ++s) {
    mps.set_tensor(site - 1, s, mps.tensor(site - 1, s) * l);
  }
}

// Cached environments for a sequence of single-site updates of the MPS part
// under a fixed graph and Hamiltonian.
class MpsSweeper {
 public:
  MpsSweeper(std::vector<Chain> chains, const MpsTensorSet& mps)
      : chains_(std::move(chains)),
        norm_(norm_chain(mps.n_sites())),
        h_envs_(mps, mps, chains_),
        n_envs_(mps, mps, norm_) {}

  // `shift` > 0 moves the gauge to the right neighbor after the update,
  // `shift` < 0 to the left one.
  UpdateResult update(MpsTensorSet& mps, int site, double cutoff,
                      int shift = 0) {
    UpdateResult result;
    const auto t0 = Clock::now();
    const int dl = mps.left_dim(site);
    const int dr = mps.right_dim(site);
    Mat h = effective_matrix(chains_, h_envs_, site, dl, dr);
    h = 0.5 * (h + h.adjoint()).eval();
    Mat n = effective_matrix(norm_, n_envs_, site, dl, dr);
    n = 0.5 * (n + n.adjoint()).eval();
    result.assembly_ms = ms_since(t0);

    const Vec old = flatten_site(mps.site(site));
    const double old_norm = old.dot(n * old).real();
    const double old_energy = old.dot(h * old).real() / old_norm;
    result.energy = old_energy;

    const auto t1 = Clock::now();
    PencilSpectrum spec;
    try {
      spec = pencil_spectrum(HermitianPencil{h, n}, cutoff);
    } catch (const DegenerateNormError&) {
      result.solve_ms = ms_since(t1);
      return result;
    }
    Vec best = spec.vectors.col(0);
    // Degenerate minimum: keep the direction closest to the incumbent.
    int cluster = 1;
    while (cluster < spec.values.size() &&
           spec.values(cluster) - spec.values(0) < 1e-12) {
      ++cluster;
    }
    if (cluster > 1 && old_norm > 0.0) {
      const Mat sub = spec.vectors.leftCols(cluster);
      const Vec coeff = sub.adjoint() * (n * old);
      if (coeff.norm() > 0.0) {
        best = sub * coeff;
        best /= std::sqrt(best.dot(n * best).real());
      }
    }
    result.solve_ms = ms_since(t1);
    const double lambda = spec.values(0);
    if (std::isfinite(old_energy) && lambda > old_energy + 1e-9) {
      return result;
    }
    const auto tensors = unflatten_site(best, dl, dr);
    mps.set_tensor(site, 0, tensors[0]);
    mps.set_tensor(site, 1, tensors[1]);
    if (shift > 0) shift_gauge_right(mps, site);
    if (shift < 0) shift_gauge_left(mps, site);
    h_envs_.advance_left(site, mps, mps, chains_);
    h_envs_.advance_right(site, mps, mps, chains_);
    n_envs_.advance_left(site, mps, mps, norm_);
    n_envs_.advance_right(site, mps, mps, norm_);
    result.energy = lambda;
    result.applied = true;
    return result;
  }

 private:
  std::vector<Chain> chains_;
  std::vector<Chain> norm_;
  ChainEnvironments h_envs_;
  ChainEnvironments n_envs_;
};

template <typename Record>
void mps_pass(std::vector<Chain> chains, MpsTensorSet& mps,
              const SweepConfig& cfg, int sw, EnergyTrace& trace,
              Record& record, double& current) {
  const int n = mps.n_sites();
  MpsSweeper sweeper(std::move(chains), mps);
  std::vector<std::pair<int, int>> order;
  for (int k = 0; k < n; ++k) order.emplace_back(k, k + 1 < n ? 1 : -1);
  for (int k = n - 2; k >= 0; --k) order.emplace_back(k, -1);
  for (const auto& [k, shift] : order) {
    UpdateResult r = sweeper.update(mps, k, cfg.pencil_cutoff, shift);
    if (!r.applied) {
      trace.warnings.push_back("sweep " + std::to_string(sw) +
                               ": MPS update skipped at site " +
                               std::to_string(k));
    }
    current = r.energy;
    record(sw, UpdateKind::kMps, k, -1, r);
  }
}

void check_sweep_config(const SweepConfig& cfg) {
  if (cfg.max_sweeps < 1 || !(cfg.energy_tol > 0.0) ||
      !(cfg.pencil_cutoff > 0.0)) {
    throw std::invalid_argument("sweep config needs positive counts");
  }
}

Complex operator_numerator(const MpsTensorSet& mps,
                           const AdjacencyPhaseMatrix& phi,
                           const LocalOperator& op) {
  return contract_chains(mps, mps,
                         observable_chains(phi, op.support, op.matrix));
}

bool touches(const LocalOperator& op, int j, int k) {
  return std::find(op.support.begin(), op.support.end(), j) !=
             op.support.end() ||
         std::find(op.support.begin(), op.support.end(), k) !=
             op.support.end();
}

// Operators already expressed in the rotation-free frame.
PhaseQuadratic quadratic_in_frame(const MpsTensorSet& mps,
                                  const AdjacencyPhaseMatrix& phi,
                                  const std::vector<LocalOperator>& ops,
                                  int j, int k, double norm) {
  AdjacencyPhaseMatrix probe = phi;
  double e[3];
  const double angles[3] = {0.0, 0.5 * kPi, kPi};
  for (int a = 0; a < 3; ++a) {
    probe.set(j, k, angles[a]);
    Complex num = 0.0;
    for (const LocalOperator& op : ops) {
      if (touches(op, j, k)) num += operator_numerator(mps, probe, op);
    }
    e[a] = num.real() / norm;
  }
  PhaseQuadratic q;
  q.c0 = 0.5 * (e[0] + e[2]);
  q.c1 = Complex(0.25 * (e[0] - e[2]), 0.5 * (q.c0 - e[1]));
  return q;
}

std::vector<LocalOperator> rotated_operators(const RageState& state,
                                             const Hamiltonian& h) {
  std::vector<LocalOperator> ops = h.local_operators();
  for (LocalOperator& op : ops) {
    std::vector<Mat2> factors;
    for (int s : op.support) factors.push_back(state.rotation(s));
    const Mat w = tensor_product(factors);
    op.matrix = w.adjoint() * op.matrix * w;
  }
  return ops;
}

// Applies the optimal phase for (j,k) given the quadratic model; returns the
// energy change.
UpdateResult apply_phase_model(AdjacencyPhaseMatrix& phi,
                               const PhaseQuadratic& q, int j, int k,
                               double energy_before) {
  UpdateResult result;
  result.energy = energy_before;
  if (std::abs(q.c1) < 1e-14) return result;
  const double old_phase = phi(j, k);
  const double best = wrap_phase(kPi - std::arg(q.c1));
  const double delta = q.value(best) - q.value(old_phase);
  if (delta > 0.0) return result;
  phi.set(j, k, best);
  result.energy = energy_before + delta;
  result.applied = true;
  return result;
}

// O on `support` embedded into the larger sorted support `outer`.
Mat embed_operator(const Mat& op, std::span<const int> support,
                   std::span<const int> outer) {
  const int n_outer = static_cast<int>(outer.size());
  const int n_inner = static_cast<int>(support.size());
  std::vector<int> pos(n_inner);
  for (int p = 0; p < n_inner; ++p) {
    pos[p] = static_cast<int>(
        std::find(outer.begin(), outer.end(), support[p]) - outer.begin());
  }
  int inner_mask = 0;
  for (int p : pos) inner_mask |= 1 << (n_outer - 1 - p);
  auto restrict_bits = [&](int idx) {
    int out = 0;
    for (int p = 0; p < n_inner; ++p) {
      out = (out << 1) | ((idx >> (n_outer - 1 - pos[p])) & 1);
    }
    return out;
  };
  const int dim = 1 << n_outer;
  Mat out = Mat::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      if ((a & ~inner_mask) != (b & ~inner_mask)) continue;
      out(a, b) = op(restrict_bits(a), restrict_bits(b));
    }
  }
  return out;
}

std::array<Mat2, 4> rotation_basis() {
  return {pauli(Pauli::kI), kI * pauli(Pauli::kX), kI * pauli(Pauli::kY),
          kI * pauli(Pauli::kZ)};
}

RageState rotation_free_copy(const RageState& state) {
  return RageState(state.mps(), state.phi(),
                   std::vector<Mat2>(state.n_sites(), Mat2::Identity()));
}

}  // namespace

std::vector<std::pair<int, int>> phase_pair_list(int n_sites,
                                                 const SweepConfig& cfg) {
  if (cfg.phase_pairs == PhasePairs::kEdgeList) {
    for (const auto& [j, k] : cfg.edge_list) {
      if (j == k || j < 0 || k < 0 || j >= n_sites || k >= n_sites) {
        throw std::invalid_argument("invalid phase edge");
      }
    }
    return cfg.edge_list;
  }
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < n_sites; ++j) {
    for (int k = j + 1; k < n_sites; ++k) pairs.emplace_back(j, k);
  }
  return pairs;
}

UpdateResult local_mps_update(RageState& state, const Hamiltonian& h_v,
                              int site, double cutoff) {
  if (site < 0 || site >= state.n_sites()) {
    throw std::out_of_range("update site out of range");
  }
  MpsSweeper sweeper(hamiltonian_chains(state.phi(), h_v), state.mps());
  return sweeper.update(state.mps(), site, cutoff);
}

PhaseQuadratic phase_quadratic(const RageState& state, const Hamiltonian& h,
                               int j, int k) {
  if (j == k) throw std::invalid_argument("phase update needs two sites");
  const double norm = mps_norm_sq(state.mps());
  if (!(norm > 0.0)) throw DegenerateNormError("state has zero norm");
  return quadratic_in_frame(state.mps(), state.phi(),
                            rotated_operators(state, h), j, k, norm);
}

UpdateResult local_phase_update(RageState& state, const Hamiltonian& h, int j,
                                int k) {
  const auto t0 = Clock::now();
  const PhaseQuadratic q = phase_quadratic(state, h, j, k);
  const double before = energy(state, h);
  UpdateResult r = apply_phase_model(state.phi(), q, j, k, before);
  r.assembly_ms = ms_since(t0);
  return r;
}

UpdateResult local_rotation_update(RageState& state, const Hamiltonian& h,
                                   int site, double cutoff) {
  if (site < 0 || site >= state.n_sites()) {
    throw std::out_of_range("rotation site out of range");
  }
  const auto t0 = Clock::now();
  const auto basis = rotation_basis();
  const Mat2 v_old = state.rotation(site);

  RealMat q = RealMat::Zero(4, 4);
  RealMat nq = RealMat::Zero(4, 4);
  auto accumulate = [&](const std::vector<int>& outer, const Mat& sigma,
                        const Mat& op, RealMat& target) {
    std::array<Mat, 4> w;
    for (int a = 0; a < 4; ++a) {
      std::vector<Mat2> factors;
      for (int t : outer) {
        factors.push_back(t == site ? Mat2(basis[a] * v_old)
                                    : state.rotation(t));
      }
      w[a] = tensor_product(factors);
    }
    for (int a = 0; a < 4; ++a) {
      const Mat left = w[a].adjoint() * op;
      for (int b = 0; b < 4; ++b) {
        target(a, b) += (left * w[b] * sigma).trace().real();
      }
    }
  };

  for (const LocalOperator& op : h.local_operators()) {
    std::vector<int> outer = op.support;
    if (std::find(outer.begin(), outer.end(), site) == outer.end()) {
      outer.push_back(site);
      std::sort(outer.begin(), outer.end());
    }
    const Mat sigma = support_density(state, outer);
    accumulate(outer, sigma, embed_operator(op.matrix, op.support, outer), q);
  }
  {
    const std::vector<int> single{site};
    const Mat sigma = support_density(state, single);
    accumulate(single, sigma, Mat::Identity(2, 2), nq);
  }
  q = 0.5 * (q + q.transpose()).eval();
  nq = 0.5 * (nq + nq.transpose()).eval();

  UpdateResult result;
  result.assembly_ms = ms_since(t0);
  result.energy = q(0, 0) / nq(0, 0);
  const auto t1 = Clock::now();
  Eigen::SelfAdjointEigenSolver<RealMat> n_eig(nq);
  const double top = n_eig.eigenvalues().maxCoeff();
  if (!(top > 0.0) || n_eig.eigenvalues().minCoeff() <= cutoff * top) {
    result.solve_ms = ms_since(t1);
    return result;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<RealMat> eig(q, nq);
  result.solve_ms = ms_since(t1);
  if (eig.info() != Eigen::Success) return result;
  const double lambda = eig.eigenvalues()(0);
  if (lambda > result.energy + 1e-9) return result;
  RealVec x = eig.eigenvectors().col(0);
  x.normalize();
  Mat2 v = Mat2::Zero();
  for (int a = 0; a < 4; ++a) v += x(a) * basis[a];
  state.set_rotation(site, v * v_old);
  result.energy = lambda;
  result.applied = true;
  return result;
}

EnergyTrace sweep(RageState& state, const Hamiltonian& h,
                  const SweepConfig& cfg, const ProgressFn& progress) {
  check_sweep_config(cfg);
  const int n = state.n_sites();
  const std::vector<std::pair<int, int>> pairs =
      cfg.phase_updates ? phase_pair_list(n, cfg)
                        : std::vector<std::pair<int, int>>{};
  EnergyTrace trace;
  double current = energy(state, h);
  auto record = [&](int sw, UpdateKind kind, int a, int b,
                    const UpdateResult& r) {
    TraceRecord rec{sw, kind, a, b, r.energy, !r.applied, r.assembly_ms,
                    r.solve_ms};
    trace.records.push_back(rec);
    if (progress) progress(rec);
  };

  for (int sw = 1; sw <= cfg.max_sweeps; ++sw) {
    const double sweep_start = current;
    const Hamiltonian h_v =
        state.rotations_identity()
            ? h
            : conjugate_by_rotations(h, state.rotations());
    mps_pass(hamiltonian_chains(state.phi(), h_v), state.mps(), cfg, sw,
             trace, record, current);
    if (!pairs.empty()) {
      const std::vector<LocalOperator> ops = h_v.local_operators();
      const double norm = mps_norm_sq(state.mps());
      for (const auto& [j, k] : pairs) {
        const auto t0 = Clock::now();
        const PhaseQuadratic q =
            quadratic_in_frame(state.mps(), state.phi(), ops, j, k, norm);
        UpdateResult r = apply_phase_model(state.phi(), q, j, k, current);
        r.assembly_ms = ms_since(t0);
        current = r.energy;
        record(sw, UpdateKind::kPhase, j, k, r);
      }
    }
    if (cfg.rotation_updates) {
      for (int k = 0; k < n; ++k) {
        UpdateResult r = local_rotation_update(state, h, k, cfg.pencil_cutoff);
        current = r.energy;
        record(sw, UpdateKind::kRotation, k, -1, r);
      }
    }
    trace.sweeps = sw;
    const double drop = sweep_start - current;
    if (drop < cfg.energy_tol * std::max(std::abs(current), 1e-12)) {
      trace.converged = true;
      break;
    }
  }

  if (cfg.gradient_refine) {
    EnergyTrace refine = gradient_refine(state, h, cfg);
    trace.records.insert(trace.records.end(), refine.records.begin(),
                         refine.records.end());
    trace.line_search_failed = refine.line_search_failed;
    current = refine.final_energy;
  }
  normalize_mps(state.mps());
  trace.final_energy = current;
  return trace;
}

EnergyTrace mps_sweep(MpsTensorSet& mps, const Hamiltonian& h,
                      const SweepConfig& cfg, const ProgressFn& progress) {
  check_sweep_config(cfg);
  const std::vector<Chain> chains = mps_hamiltonian_chains(h);
  EnergyTrace trace;
  double current = mps_energy(mps, h);
  auto record = [&](int sw, UpdateKind kind, int a, int b,
                    const UpdateResult& r) {
    TraceRecord rec{sw, kind, a, b, r.energy, !r.applied, r.assembly_ms,
                    r.solve_ms};
    trace.records.push_back(rec);
    if (progress) progress(rec);
  };
  for (int sw = 1; sw <= cfg.max_sweeps; ++sw) {
    const double sweep_start = current;
    mps_pass(chains, mps, cfg, sw, trace, record, current);
    trace.sweeps = sw;
    if (sweep_start - current <
        cfg.energy_tol * std::max(std::abs(current), 1e-12)) {
      trace.converged = true;
      break;
    }
  }
  normalize_mps(mps);
  trace.final_energy = current;
  return trace;
}

double EnergyGradient::squared_norm() const {
  double total = 0.0;
  for (const Vec& g : tensors) total += 4.0 * g.squaredNorm();
  for (double d : phases) total += d * d;
  return total;
}

std::string to_string(GradientMethod m) {
  return m == GradientMethod::kLbfgs ? "lbfgs" : "steepest";
}

GradientMethod gradient_method_from_string(const std::string& s) {
  if (s == "lbfgs") return GradientMethod::kLbfgs;
  if (s == "steepest") return GradientMethod::kSteepestDescent;
  throw std::invalid_argument("unknown gradient method '" + s + "'");
}

EnergyGradient energy_gradient(const RageState& state, const Hamiltonian& h_v,
                               const std::vector<std::pair<int, int>>& pairs) {
  const MpsTensorSet& mps = state.mps();
  const int n = mps.n_sites();
  std::vector<ChainOrigin> origins;
  const std::vector<Chain> chains =
      hamiltonian_chains(state.phi(), h_v, &origins);
  const std::vector<Chain> norm_ch = norm_chain(n);
  const ChainEnvironments h_envs(mps, mps, chains);
  const ChainEnvironments n_envs(mps, mps, norm_ch);

  Complex num = 0.0;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const Complex v = chains[c].weight * h_envs.value(c);
    num += chains[c].mirrored ? Complex(2.0 * v.real()) : v;
  }
  const double norm = n_envs.value(0).real();
  if (!(norm > 0.0)) throw DegenerateNormError("state has zero norm");

  EnergyGradient g;
  g.energy = num.real() / norm;
  for (int k = 0; k < n; ++k) {
    const Vec ha = effective_vector(chains, h_envs, k, mps.site(k));
    const Vec na = effective_vector(norm_ch, n_envs, k, mps.site(k));
    g.tensors.push_back((ha - g.energy * na) / norm);
  }
  g.pairs = pairs;
  if (pairs.empty()) return g;

  // Phi[a,b] enters a chain through the intra-support gate in its weight
  // (a, b both in the support) or through the c(1,1) entry at the
  // complement site. Only mirrored chains (s != r) depend on it.
  const std::vector<LocalOperator> ops = h_v.local_operators();
  RealMat d = RealMat::Zero(n, n);
  SiteCoefficients pick = Mat2::Zero();
  pick(1, 1) = 1.0;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const Chain& ch = chains[c];
    if (!ch.mirrored) continue;
    const std::vector<int>& support = ops[origins[c].op].support;
    const int m = static_cast<int>(support.size());
    const int s = origins[c].s;
    const int r = origins[c].r;
    auto bit = [m](int idx, int p) { return (idx >> (m - 1 - p)) & 1; };
    const Complex base = ch.weight * h_envs.value(c);
    for (int p = 0; p < m; ++p) {
      for (int q = p + 1; q < m; ++q) {
        const int db = bit(s, p) * bit(s, q) - bit(r, p) * bit(r, q);
        if (db != 0) {
          d(support[p], support[q]) += 2.0 * (Complex(0.0, db) * base).real();
        }
      }
    }
    for (int k = 0; k < n; ++k) {
      if (std::find(support.begin(), support.end(), k) != support.end()) {
        continue;
      }
      EnvBlocks env = h_envs.left(c, k);
      absorb_left(env, pick, mps.site(k), mps.site(k));
      const Complex t = ch.weight * ch.coeffs[k](1, 1) *
                        join(env, h_envs.right(c, k + 1));
      for (int p = 0; p < m; ++p) {
        const int db = bit(s, p) - bit(r, p);
        if (db != 0) d(support[p], k) += 2.0 * (Complex(0.0, db) * t).real();
      }
    }
  }
  for (const auto& [a, b] : pairs) {
    g.phases.push_back((d(a, b) + d(b, a)) / norm);
  }
  return g;
}

Eigen::Vector4d rotation_quaternion(const Mat2& v) {
  const Complex det = v.determinant();
  if (std::abs(det) < 1e-300) throw std::invalid_argument("singular rotation");
  const Mat2 u = v * std::polar(1.0 / std::sqrt(std::abs(det)), -0.5 * std::arg(det));
  Eigen::Vector4d q(u(0, 0).real(), u(0, 1).imag(), u(0, 1).real(),
                    u(0, 0).imag());
  if (q(0) < 0.0) q = -q;
  return q.normalized();
}

Mat2 quaternion_rotation(const Eigen::Vector4d& q) {
  const Eigen::Vector4d u = q.normalized();
  Mat2 v;
  v << Complex(u(0), u(3)), Complex(u(2), u(1)), Complex(-u(2), u(1)),
      Complex(u(0), -u(3));
  return v;
}

std::vector<Eigen::Vector4d> rotation_gradient(const RageState& state,
                                               const Hamiltonian& h) {
  const int n = state.n_sites();
  const double norm = mps_norm_sq(state.mps());
  if (!(norm > 0.0)) throw DegenerateNormError("state has zero norm");
  const auto basis = rotation_basis();
  std::vector<Eigen::Vector4d> u(n);
  for (int k = 0; k < n; ++k) u[k] = rotation_quaternion(state.rotation(k));

  // Only operators touching a site depend on its rotation.
  std::vector<RealMat> hq(n, RealMat::Zero(4, 4));
  for (const LocalOperator& op : h.local_operators()) {
    const Mat sigma = support_density(state, op.support);
    for (std::size_t p = 0; p < op.support.size(); ++p) {
      const int site = op.support[p];
      std::array<Mat, 4> w;
      for (int a = 0; a < 4; ++a) {
        std::vector<Mat2> factors;
        for (int t : op.support) {
          factors.push_back(t == site ? basis[a] : state.rotation(t));
        }
        w[a] = tensor_product(factors);
      }
      for (int a = 0; a < 4; ++a) {
        const Mat left = w[a].adjoint() * op.matrix;
        for (int b = 0; b < 4; ++b) {
          hq[site](a, b) += (left * w[b] * sigma).trace().real() / norm;
        }
      }
    }
  }
  std::vector<Eigen::Vector4d> grad(n);
  for (int k = 0; k < n; ++k) {
    const RealMat sym = 0.5 * (hq[k] + hq[k].transpose());
    Eigen::Vector4d g = 2.0 * sym * u[k];
    g -= u[k] * u[k].dot(g);
    grad[k] = g;
  }
  return grad;
}

namespace {

// Real coordinates of a state: Re and Im of every flattened site tensor,
// the listed phases, then one quaternion per site.
class ParameterMap {
 public:
  ParameterMap(const RageState& state,
               std::vector<std::pair<int, int>> pairs, bool rotations)
      : pairs_(std::move(pairs)), rotations_(rotations) {
    const MpsTensorSet& mps = state.mps();
    for (int k = 0; k < mps.n_sites(); ++k) {
      offsets_.push_back(size_);
      size_ += 4 * mps.left_dim(k) * mps.right_dim(k);
    }
    phase_offset_ = size_;
    size_ += static_cast<int>(pairs_.size());
    rotation_offset_ = size_;
    if (rotations_) size_ += 4 * mps.n_sites();
  }

  int size() const { return size_; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

  RealVec pack(const RageState& state) const {
    RealVec x(size_);
    const MpsTensorSet& mps = state.mps();
    for (int k = 0; k < mps.n_sites(); ++k) {
      const Vec a = flatten_site(mps.site(k));
      const int m = static_cast<int>(a.size());
      x.segment(offsets_[k], m) = a.real();
      x.segment(offsets_[k] + m, m) = a.imag();
    }
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      x(phase_offset_ + p) = state.phi()(pairs_[p].first, pairs_[p].second);
    }
    if (rotations_) {
      for (int k = 0; k < mps.n_sites(); ++k) {
        x.segment<4>(rotation_offset_ + 4 * k) =
            rotation_quaternion(state.rotation(k));
      }
    }
    return x;
  }

  void unpack(const RealVec& x, RageState& state) const {
    MpsTensorSet& mps = state.mps();
    for (int k = 0; k < mps.n_sites(); ++k) {
      const int dl = mps.left_dim(k);
      const int dr = mps.right_dim(k);
      const int m = 2 * dl * dr;
      Vec a(m);
      for (int i = 0; i < m; ++i) {
        a(i) = Complex(x(offsets_[k] + i), x(offsets_[k] + m + i));
      }
      const auto t = unflatten_site(a, dl, dr);
      mps.set_tensor(k, 0, t[0]);
      mps.set_tensor(k, 1, t[1]);
    }
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      state.phi().set(pairs_[p].first, pairs_[p].second,
                      x(phase_offset_ + p));
    }
    if (rotations_) {
      for (int k = 0; k < mps.n_sites(); ++k) {
        state.set_rotation(
            k, quaternion_rotation(x.segment<4>(rotation_offset_ + 4 * k)));
      }
    }
  }

  // Energy and real gradient at the state stored in `state`.
  double evaluate(const RageState& state, const Hamiltonian& h,
                  RealVec& grad) const {
    const Hamiltonian h_v =
        state.rotations_identity()
            ? h
            : conjugate_by_rotations(h, state.rotations());
    const EnergyGradient g =
        energy_gradient(rotation_free_copy(state), h_v, pairs_);
    grad.resize(size_);
    for (int k = 0; k < state.n_sites(); ++k) {
      const int m = static_cast<int>(g.tensors[k].size());
      grad.segment(offsets_[k], m) = 2.0 * g.tensors[k].real();
      grad.segment(offsets_[k] + m, m) = 2.0 * g.tensors[k].imag();
    }
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      grad(phase_offset_ + p) = g.phases[p];
    }
    if (rotations_) {
      const auto rg = rotation_gradient(state, h);
      for (int k = 0; k < state.n_sites(); ++k) {
        // Scale invariance of quaternion_rotation: divide by |q|.
        const Eigen::Vector4d q = rotation_quaternion(state.rotation(k));
        grad.segment<4>(rotation_offset_ + 4 * k) = rg[k] / q.norm();
      }
    }
    return g.energy;
  }

 private:
  std::vector<std::pair<int, int>> pairs_;
  bool rotations_;
  std::vector<int> offsets_;
  int size_ = 0;
  int phase_offset_ = 0;
  int rotation_offset_ = 0;
};

void perturb(RageState& state, const std::vector<std::pair<int, int>>& pairs,
             bool rotations, double amplitude, Rng& rng) {
  for (const auto& [j, k] : pairs) {
    state.phi().add(j, k, amplitude * rng.normal());
  }
  if (!rotations) return;
  for (int k = 0; k < state.n_sites(); ++k) {
    Eigen::Vector4d q = rotation_quaternion(state.rotation(k));
    for (int a = 0; a < 4; ++a) q(a) += amplitude * rng.normal();
    state.set_rotation(k, quaternion_rotation(q));
  }
}

// Descent from `state`; returns the trace and leaves the best state found.
EnergyTrace descend(RageState& state, const Hamiltonian& h,
                    const SweepConfig& cfg, bool rotations) {
  const std::vector<std::pair<int, int>> pairs =
      cfg.phase_updates ? phase_pair_list(state.n_sites(), cfg)
                        : std::vector<std::pair<int, int>>{};
  const ParameterMap map(state, pairs, rotations);
  RageState trial = state;
  RealVec x = map.pack(state);
  RealVec g;
  double f = map.evaluate(state, h, g);
  EnergyTrace trace;
  std::vector<RealVec> s_hist;
  std::vector<RealVec> y_hist;
  double step = 1.0;
  for (int it = 0; it < cfg.gradient_steps; ++it) {
    const auto t0 = Clock::now();
    if (g.norm() < 1e-6) {
      trace.converged = true;
      break;
    }
    RealVec d = -g;
    if (cfg.gradient_method == GradientMethod::kLbfgs && !s_hist.empty()) {
      const std::size_t m = s_hist.size();
      std::vector<double> alpha(m);
      RealVec q = g;
      for (std::size_t i = m; i-- > 0;) {
        const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
        alpha[i] = rho * s_hist[i].dot(q);
        q -= alpha[i] * y_hist[i];
      }
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      for (std::size_t i = 0; i < m; ++i) {
        const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
        const double beta = rho * y_hist[i].dot(q);
        q += (alpha[i] - beta) * s_hist[i];
      }
      d = -q;
      if (d.dot(g) >= 0.0) {
        d = -g;
        s_hist.clear();
        y_hist.clear();
      }
    }
    double t = cfg.gradient_method == GradientMethod::kLbfgs
                   ? (s_hist.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0)
                   : step;
    const double slope = g.dot(d);
    bool accepted = false;
    RealVec x_new;
    double f_new = 0.0;
    for (int tries = 0; tries < 60; ++tries) {
      x_new = x + t * d;
      map.unpack(x_new, trial);
      try {
        f_new = energy(trial, h);
      } catch (const DegenerateNormError&) {
        f_new = std::numeric_limits<double>::infinity();
      }
      if (f_new <= f + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      trace.line_search_failed = true;
      trace.warnings.push_back("gradient line search failed");
      break;
    }
    step = 2.0 * t;
    RealVec g_new;
    f_new = map.evaluate(trial, h, g_new);
    const RealVec s = x_new - x;
    const RealVec y = g_new - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      if (static_cast<int>(s_hist.size()) > cfg.lbfgs_memory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
      }
    }
    x = x_new;
    g = g_new;
    f = f_new;
    state = trial;
    trace.records.push_back(TraceRecord{it + 1, UpdateKind::kGradient, -1, -1,
                                        f, false, ms_since(t0), 0.0});
  }
  trace.final_energy = f;
  return trace;
}

}  // namespace

EnergyTrace gradient_refine(RageState& state, const Hamiltonian& h,
                            const SweepConfig& cfg) {
  if (cfg.gradient_steps < 0 || cfg.lbfgs_memory < 1) {
    throw std::invalid_argument("gradient config needs positive counts");
  }
  const bool rotations = cfg.gradient_rotations && cfg.rotation_updates &&
                         state.non_unitary_sites().empty();
  RageState base = state;
  EnergyTrace trace = descend(base, h, cfg, rotations);
  if (cfg.perturbation > 0.0 && (cfg.phase_updates || rotations)) {
    RageState kicked = state;
    Rng rng(cfg.seed, 3);
    const std::vector<std::pair<int, int>> pairs =
        cfg.phase_updates ? phase_pair_list(state.n_sites(), cfg)
                          : std::vector<std::pair<int, int>>{};
    perturb(kicked, pairs, rotations, cfg.perturbation, rng);
    EnergyTrace second = descend(kicked, h, cfg, rotations);
    if (second.final_energy < trace.final_energy) {
      second.records.insert(second.records.begin(), trace.records.begin(),
                            trace.records.end());
      trace = std::move(second);
      base = std::move(kicked);
    }
  }
  normalize_mps(base.mps());
  state = std::move(base);
  return trace;
}

}  // namespace rage
