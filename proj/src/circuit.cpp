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

#include "rage/circuit.hpp"

#include <cmath>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rage/chain.hpp"
#include "rage/graph.hpp"

namespace rage {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_site(int j, int n, const char* what) {
  if (j < 0 || j >= n) throw std::out_of_range(std::string(what) + " out of range");
}

void require_plain_rotations(const RageState& state) {
  if (!state.rotations_identity()) {
    throw std::invalid_argument("circuit simulation needs V = 1");
  }
}

SiteCoefficients star_coefficients(int x, int y, double theta,
                                   double theta_bra) {
  SiteCoefficients c = SiteCoefficients::Zero();
  c(0, 0) = 1.0;
  c(1, 1) = std::polar(1.0, theta * x - theta_bra * y);
  return c;
}

// <bra, Phi_bra| G_j |ket, Phi_ket> for states whose phase matrices agree
// outside row j. theta/theta_bra hold row j of the ket/bra phases. One chain
// per (ket bit x, bra bit y) at site j.
class StarOverlap {
 public:
  StarOverlap(int n, int j, const Mat2& g, const std::vector<double>& theta,
              const std::vector<double>& theta_bra)
      : theta_(theta) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        if (g(y, x) == Complex(0.0)) continue;
        Chain c;
        c.coeffs.resize(n);
        for (int k = 0; k < n; ++k) {
          if (k == j) {
            c.coeffs[k] = SiteCoefficients::Zero();
            c.coeffs[k](x, y) = g(y, x);
          } else {
            c.coeffs[k] = star_coefficients(x, y, theta[k], theta_bra[k]);
          }
        }
        chains_.push_back(std::move(c));
        bits_.emplace_back(x, y);
      }
    }
  }

  const std::vector<Chain>& chains() const { return chains_; }

  void set_bra_phase(int k, double theta_bra) {
    for (std::size_t c = 0; c < chains_.size(); ++c) {
      chains_[c].coeffs[k] = star_coefficients(bits_[c].first, bits_[c].second,
                                               theta_[k], theta_bra);
    }
  }

  // Overlap with site k's bra phase replaced, from environments that are
  // valid left of k and right of k.
  Complex value_with_phase(const ChainEnvironments& envs,
                           const MpsTensorSet& ket, const MpsTensorSet& bra,
                           int k, double theta_bra) const {
    Complex total = 0.0;
    for (std::size_t c = 0; c < chains_.size(); ++c) {
      EnvBlocks left = envs.left(c, k);
      absorb_left(left,
                  star_coefficients(bits_[c].first, bits_[c].second,
                                    theta_[k], theta_bra),
                  ket.site(k), bra.site(k));
      total += chains_[c].weight * join(left, envs.right(c, k + 1));
    }
    return total;
  }

 private:
  std::vector<double> theta_;
  std::vector<Chain> chains_;
  std::vector<std::pair<int, int>> bits_;
};

// Maximizes |<bra|G_j|ket>|^2 / <bra|bra> over the bra tensors and, when
// vary_phases is set, the bra phases of row j.
FitResult fit_star(const MpsTensorSet& ket, int j, const Mat2& g,
                   const std::vector<double>& theta, MpsTensorSet& bra,
                   std::vector<double>& theta_bra, bool vary_phases,
                   const FitConfig& cfg) {
  const int n = ket.n_sites();
  const double target_norm = mps_norm_sq(ket);
  if (!(target_norm > 0.0)) throw DegenerateNormError("zero target state");

  StarOverlap star(n, j, g, theta, theta_bra);
  const std::vector<Chain> norm_chain{
      Chain{1.0, false,
            std::vector<SiteCoefficients>(n, identity_coefficients())}};

  FitResult result;
  double bra_norm = mps_norm_sq(bra);
  double current =
      std::norm(contract_chains(ket, bra, star.chains())) /
      (bra_norm * target_norm);
  result.initial_overlap = current;
  result.history.push_back(current);
  if (current >= 1.0 - 1e-14) {
    result.overlap = current;
    result.converged = true;
    return result;
  }

  ChainEnvironments star_envs(ket, bra, star.chains());
  ChainEnvironments norm_envs(bra, bra, norm_chain);
  for (int pass = 1; pass <= cfg.max_passes; ++pass) {
    const double pass_start = current;
    if (pass > 1) {
      star_envs.rebuild(ket, bra, star.chains());
      norm_envs.rebuild(bra, bra, norm_chain);
    }
    for (int k = 0; k < n; ++k) {
      const int dl = bra.left_dim(k);
      const int dr = bra.right_dim(k);
      const Vec m = effective_vector(star.chains(), star_envs, k, ket.site(k));
      Mat nm = effective_matrix(norm_chain, norm_envs, k, dl, dr);
      nm = 0.5 * (nm + nm.adjoint()).eval();
      Vec b = solve_truncated(nm, m, cfg.cutoff);
      const double nb = b.dot(nm * b).real();
      if (nb > 0.0 && std::isfinite(nb)) {
        b /= std::sqrt(nb);
        const double candidate = std::norm(b.dot(m)) / target_norm;
        if (candidate >= current) {
          const auto t = unflatten_site(b, dl, dr);
          bra.set_tensor(k, 0, t[0]);
          bra.set_tensor(k, 1, t[1]);
          bra_norm = 1.0;
          current = candidate;
        }
      }
      result.history.push_back(current);

      if (vary_phases && k != j) {
        const Complex at0 =
            star.value_with_phase(star_envs, ket, bra, k, 0.0);
        const Complex at_pi =
            star.value_with_phase(star_envs, ket, bra, k, kPi);
        const Complex alpha = 0.5 * (at0 + at_pi);
        const Complex beta = 0.5 * (at0 - at_pi);
        if (std::abs(alpha) > 0.0 && std::abs(beta) > 0.0) {
          const Complex z =
              std::conj(beta) * alpha / (std::abs(alpha) * std::abs(beta));
          const double best = wrap_phase(-std::arg(z));
          const double candidate =
              std::norm(alpha + beta * std::polar(1.0, -best)) /
              (bra_norm * target_norm);
          if (candidate >= current) {
            theta_bra[k] = best;
            star.set_bra_phase(k, best);
            current = candidate;
          }
        }
        result.history.push_back(current);
      }
      star_envs.advance_left(k, ket, bra, star.chains());
      norm_envs.advance_left(k, bra, bra, norm_chain);
    }
    result.passes = pass;
    if (current - pass_start <= cfg.rel_tol * pass_start ||
        current >= 1.0 - 1e-14) {
      result.converged = true;
      break;
    }
  }
  result.overlap = current;
  normalize_mps(bra);
  return result;
}

std::vector<double> phase_row(const AdjacencyPhaseMatrix& phi, int j) {
  std::vector<double> row(phi.n_sites());
  for (int k = 0; k < phi.n_sites(); ++k) row[k] = k == j ? 0.0 : phi(j, k);
  return row;
}

void fold_into_site(MpsTensorSet& mps, int j, const Mat2& u) {
  const Mat a0 = mps.tensor(j, 0);
  const Mat a1 = mps.tensor(j, 1);
  mps.set_tensor(j, 0, u(0, 0) * a0 + u(0, 1) * a1);
  mps.set_tensor(j, 1, u(1, 0) * a0 + u(1, 1) * a1);
}

Mat2 phase_gate(double alpha) {
  Mat2 u = Mat2::Identity();
  u(1, 1) = std::polar(1.0, alpha);
  return u;
}

}  // namespace

void validate_gate(const Gate& gate, int n_qubits) {
  std::visit(
      Overloaded{
          [&](const DiagonalPhase& g) {
            check_site(g.j, n_qubits, "gate site");
            check_site(g.k, n_qubits, "gate site");
            if (g.j == g.k) {
              throw std::invalid_argument("controlled phase needs two sites");
            }
            if (!std::isfinite(g.phi)) {
              throw std::invalid_argument("non-finite gate phase");
            }
          },
          [&](const LocalDiagonal& g) {
            check_site(g.j, n_qubits, "gate site");
            if (!std::isfinite(g.alpha)) {
              throw std::invalid_argument("non-finite gate phase");
            }
          },
          [&](const SingleQubit& g) {
            check_site(g.j, n_qubits, "gate site");
            if (!is_unitary(g.u, 1e-10)) {
              throw std::invalid_argument("single-qubit gate is not unitary");
            }
          }},
      gate);
}

void Circuit::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("circuit needs qubits");
  for (const Gate& g : gates) validate_gate(g, n_qubits);
  std::size_t prev = 0;
  for (std::size_t end : block_ends) {
    if (end < prev || end > gates.size()) {
      throw std::invalid_argument("invalid block boundaries");
    }
    prev = end;
  }
}

CircuitFormatError::CircuitFormatError(int line, const std::string& what)
    : std::runtime_error("circuit line " + std::to_string(line) + ": " + what),
      line_(line) {}

Circuit parse_circuit(std::istream& in, int n_qubits) {
  Circuit circuit;
  circuit.n_qubits = n_qubits;
  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (auto hash = text.find('#'); hash != std::string::npos) {
      text.erase(hash);
    }
    std::istringstream ls(text);
    std::string op;
    if (!(ls >> op)) continue;
    auto site = [&]() {
      int s = 0;
      if (!(ls >> s)) throw CircuitFormatError(line_no, "expected site index");
      if (s < 1 || s > n_qubits) {
        throw CircuitFormatError(line_no, "site index out of range");
      }
      return s - 1;
    };
    auto number = [&]() {
      double v = 0.0;
      if (!(ls >> v)) throw CircuitFormatError(line_no, "expected number");
      return v;
    };
    Gate gate;
    if (op == "CP") {
      const int j = site();
      const int k = site();
      gate = DiagonalPhase{j, k, number()};
    } else if (op == "LP") {
      const int j = site();
      gate = LocalDiagonal{j, number()};
    } else if (op == "U1") {
      SingleQubit g;
      g.j = site();
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          const double re = number();
          g.u(r, c) = Complex(re, number());
        }
      }
      gate = g;
    } else {
      throw CircuitFormatError(line_no, "unknown gate '" + op + "'");
    }
    std::string extra;
    if (ls >> extra) throw CircuitFormatError(line_no, "trailing input");
    try {
      validate_gate(gate, n_qubits);
    } catch (const std::exception& e) {
      throw CircuitFormatError(line_no, e.what());
    }
    circuit.add(gate);
    circuit.end_block();
  }
  return circuit;
}

void write_circuit(std::ostream& out, const Circuit& circuit) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (const Gate& gate : circuit.gates) {
    std::visit(Overloaded{[&](const DiagonalPhase& g) {
                            out << "CP " << g.j + 1 << ' ' << g.k + 1 << ' '
                                << g.phi << '\n';
                          },
                          [&](const LocalDiagonal& g) {
                            out << "LP " << g.j + 1 << ' ' << g.alpha << '\n';
                          },
                          [&](const SingleQubit& g) {
                            out << "U1 " << g.j + 1;
                            for (int r = 0; r < 2; ++r) {
                              for (int c = 0; c < 2; ++c) {
                                out << ' ' << g.u(r, c).real() << ' '
                                    << g.u(r, c).imag();
                              }
                            }
                            out << '\n';
                          }},
               gate);
  }
  out.flags(flags);
  out.precision(precision);
}

std::string to_string(Ensemble e) {
  return e == Ensemble::kMixed ? "mixed" : "diagonal";
}

Ensemble ensemble_from_string(const std::string& s) {
  if (s == "mixed") return Ensemble::kMixed;
  if (s == "diagonal") return Ensemble::kDiagonal;
  throw std::invalid_argument("unknown ensemble '" + s + "'");
}

Circuit random_circuit(int n_qubits, int blocks, Ensemble ensemble,
                       Rng& rng) {
  if (n_qubits < 2) throw std::invalid_argument("random circuit needs 2 qubits");
  if (blocks < 0) throw std::invalid_argument("negative block count");
  Circuit circuit;
  circuit.n_qubits = n_qubits;
  const auto n = static_cast<std::uint64_t>(n_qubits);
  for (int b = 0; b < blocks; ++b) {
    const int site = static_cast<int>(rng.below(n));
    if (ensemble == Ensemble::kMixed) {
      circuit.add(SingleQubit{site, rng.haar_unitary2()});
    } else {
      circuit.add(LocalDiagonal{site, rng.uniform(0.0, kTwoPi)});
    }
    const int j = static_cast<int>(rng.below(n));
    int k = static_cast<int>(rng.below(n - 1));
    if (k >= j) ++k;
    circuit.add(DiagonalPhase{std::min(j, k), std::max(j, k),
                              rng.uniform(0.0, kTwoPi)});
    circuit.end_block();
  }
  return circuit;
}

void apply_diagonal_two_qubit(RageState& state, int j, int k, double phi) {
  require_plain_rotations(state);
  check_site(j, state.n_sites(), "gate site");
  check_site(k, state.n_sites(), "gate site");
  if (j == k) throw std::invalid_argument("controlled phase needs two sites");
  state.phi().add(j, k, phi);
}

void apply_local_diagonal(RageState& state, int j, double alpha) {
  require_plain_rotations(state);
  check_site(j, state.n_sites(), "gate site");
  state.mps().set_tensor(j, 1, std::polar(1.0, alpha) * state.mps().tensor(j, 1));
}

FitResult apply_single_qubit(RageState& state, int j, const Mat2& u,
                             const FitConfig& cfg) {
  require_plain_rotations(state);
  check_site(j, state.n_sites(), "gate site");
  if (!is_unitary(u, 1e-10)) {
    throw std::invalid_argument("single-qubit gate is not unitary");
  }
  const std::vector<double> theta = phase_row(state.phi(), j);
  std::vector<double> theta_bra = theta;
  MpsTensorSet bra = state.mps();
  fold_into_site(bra, j, u);
  FitResult r = fit_star(state.mps(), j, u, theta, bra, theta_bra,
                         cfg.vary_phases, cfg);
  state.mps() = std::move(bra);
  for (int k = 0; k < state.n_sites(); ++k) {
    if (k != j) state.phi().set(j, k, theta_bra[k]);
  }
  normalize_mps(state.mps());
  return r;
}

void mps_apply_one_qubit(MpsTensorSet& mps, int j, const Mat2& u) {
  check_site(j, mps.n_sites(), "gate site");
  fold_into_site(mps, j, u);
}

FitResult mps_apply_controlled_phase(MpsTensorSet& mps, int j, int k,
                                     double phi, const FitConfig& cfg) {
  check_site(j, mps.n_sites(), "gate site");
  check_site(k, mps.n_sites(), "gate site");
  if (j == k) throw std::invalid_argument("controlled phase needs two sites");
  std::vector<double> theta(mps.n_sites(), 0.0);
  theta[k] = phi;
  std::vector<double> theta_bra(mps.n_sites(), 0.0);
  MpsTensorSet bra = mps;
  FitResult r = fit_star(mps, j, Mat2::Identity(), theta, bra, theta_bra,
                         false, cfg);
  mps = std::move(bra);
  return r;
}

std::string to_string(Backend b) {
  return b == Backend::kRage ? "rage" : "mps";
}

void apply_exact(DenseState& v, const Gate& gate) {
  std::visit(Overloaded{[&](const DiagonalPhase& g) {
                          apply_controlled_phase(v, g.j, g.k, g.phi);
                        },
                        [&](const LocalDiagonal& g) {
                          apply_one_qubit(v, g.j, phase_gate(g.alpha));
                        },
                        [&](const SingleQubit& g) {
                          apply_one_qubit(v, g.j, g.u);
                        }},
             gate);
}

CircuitRun run_circuit(RageState& state, const Circuit& circuit,
                       bool track_fidelity, Backend backend,
                       const FitConfig& cfg) {
  require_plain_rotations(state);
  if (circuit.n_qubits != state.n_sites()) {
    throw std::invalid_argument("circuit and state sizes differ");
  }
  circuit.validate();
  if (backend == Backend::kMps && !state.phi().is_zero()) {
    throw std::invalid_argument("MPS backend needs Phi = 0");
  }
  CircuitRun run;
  DenseState exact;
  if (track_fidelity) {
    exact = expand(state);
    run.fidelity.push_back(1.0);
  }
  auto note_fit = [&](const FitResult& r) {
    ++run.fits;
    if (!r.converged) ++run.fits_below_tolerance;
    run.min_fit_overlap = std::min(run.min_fit_overlap, r.overlap);
  };
  std::size_t next_block = 0;
  while (track_fidelity && next_block < circuit.block_ends.size() &&
         circuit.block_ends[next_block] == 0) {
    run.fidelity.push_back(1.0);
    ++next_block;
  }
  for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
    const Gate& gate = circuit.gates[g];
    if (backend == Backend::kRage) {
      std::visit(Overloaded{[&](const DiagonalPhase& x) {
                              apply_diagonal_two_qubit(state, x.j, x.k, x.phi);
                            },
                            [&](const LocalDiagonal& x) {
                              apply_local_diagonal(state, x.j, x.alpha);
                            },
                            [&](const SingleQubit& x) {
                              note_fit(apply_single_qubit(state, x.j, x.u, cfg));
                            }},
                 gate);
    } else {
      std::visit(Overloaded{[&](const DiagonalPhase& x) {
                              note_fit(mps_apply_controlled_phase(
                                  state.mps(), x.j, x.k, x.phi, cfg));
                            },
                            [&](const LocalDiagonal& x) {
                              mps_apply_one_qubit(state.mps(), x.j,
                                                  phase_gate(x.alpha));
                            },
                            [&](const SingleQubit& x) {
                              mps_apply_one_qubit(state.mps(), x.j, x.u);
                            }},
                 gate);
    }
    if (track_fidelity) {
      apply_exact(exact, gate);
      while (next_block < circuit.block_ends.size() &&
             circuit.block_ends[next_block] == g + 1) {
        run.fidelity.push_back(fidelity(expand(state), exact));
        ++next_block;
      }
    }
  }
  return run;
}

}  // namespace rage
