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

#include "rage/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "rage/graph.hpp"

namespace rage {

Mat2 pauli(Pauli p) {
  Mat2 m;
  switch (p) {
    case Pauli::kI:
      m << 1, 0, 0, 1;
      break;
    case Pauli::kX:
      m << 0, 1, 1, 0;
      break;
    case Pauli::kY:
      m << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    case Pauli::kZ:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

Hamiltonian::Hamiltonian(int n_sites) : n_sites_(n_sites) {
  if (n_sites < 1) throw std::invalid_argument("Hamiltonian needs sites");
}

void Hamiltonian::add_term(Complex coefficient,
                           std::vector<SiteOperator> factors) {
  if (!std::isfinite(coefficient.real()) ||
      !std::isfinite(coefficient.imag())) {
    throw std::invalid_argument("non-finite term coefficient");
  }
  if (factors.empty() || factors.size() > 2) {
    throw std::invalid_argument("terms act on one or two sites");
  }
  for (const SiteOperator& f : factors) {
    if (f.site < 0 || f.site >= n_sites_) {
      throw std::out_of_range("term site out of range");
    }
  }
  if (factors.size() == 2 && factors[0].site == factors[1].site) {
    throw std::invalid_argument("term sites must be distinct");
  }
  std::sort(factors.begin(), factors.end(),
            [](const SiteOperator& a, const SiteOperator& b) {
              return a.site < b.site;
            });
  terms_.push_back(PauliTerm{coefficient, std::move(factors)});
}

void Hamiltonian::add_pauli(
    Complex coefficient,
    std::initializer_list<std::pair<int, Pauli>> factors) {
  std::vector<SiteOperator> ops;
  for (const auto& [site, p] : factors) ops.push_back({site, pauli(p)});
  add_term(coefficient, std::move(ops));
}

std::vector<LocalOperator> Hamiltonian::local_operators() const {
  std::vector<LocalOperator> out;
  std::map<std::vector<int>, std::size_t> index;
  for (const PauliTerm& t : terms_) {
    std::vector<int> support;
    std::vector<Mat2> factors;
    for (const SiteOperator& f : t.factors) {
      support.push_back(f.site);
      factors.push_back(f.matrix);
    }
    const Mat m = t.coefficient * tensor_product(factors);
    auto it = index.find(support);
    if (it == index.end()) {
      index.emplace(support, out.size());
      out.push_back(LocalOperator{support, m});
    } else {
      out[it->second].matrix += m;
    }
  }
  return out;
}

void Hamiltonian::validate() const {
  for (const LocalOperator& op : local_operators()) {
    if (hermiticity_defect(op.matrix) > 1e-10) {
      throw std::invalid_argument("Hamiltonian is not Hermitian on a support");
    }
  }
}

LatticeMap LatticeMap::snake(int rows, int cols) {
  LatticeMap m{rows, cols, std::vector<int>(static_cast<std::size_t>(rows) * cols)};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int along = (r % 2 == 0) ? c : cols - 1 - c;
      m.chain_index[static_cast<std::size_t>(r) * cols + c] = r * cols + along;
    }
  }
  return m;
}

LatticeMap LatticeMap::row_major(int rows, int cols) {
  LatticeMap m{rows, cols, std::vector<int>(static_cast<std::size_t>(rows) * cols)};
  for (int i = 0; i < rows * cols; ++i) m.chain_index[i] = i;
  return m;
}

void LatticeMap::validate() const {
  const int n = rows * cols;
  if (rows < 1 || cols < 1 || static_cast<int>(chain_index.size()) != n) {
    throw std::invalid_argument("lattice map has the wrong size");
  }
  std::vector<bool> seen(n, false);
  for (int idx : chain_index) {
    if (idx < 0 || idx >= n || seen[idx]) {
      throw std::invalid_argument("lattice map is not a bijection");
    }
    seen[idx] = true;
  }
}

Hamiltonian build_ising_2d(int rows, int cols, double field_b,
                           double coupling, const LatticeMap* map) {
  if (rows < 2 || cols < 2) {
    throw std::invalid_argument("2D Ising needs rows, cols >= 2");
  }
  const LatticeMap snake = LatticeMap::snake(rows, cols);
  const LatticeMap& m = map ? *map : snake;
  m.validate();
  if (m.rows != rows || m.cols != cols) {
    throw std::invalid_argument("lattice map does not match the lattice");
  }
  Hamiltonian h(rows * cols);
  // Edge multiset in first-seen order, so duplicates fold into one term.
  std::vector<std::pair<int, int>> order;
  std::map<std::pair<int, int>, int> multiplicity;
  auto add_edge = [&](int a, int b) {
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    if (multiplicity[key]++ == 0) order.push_back(key);
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      add_edge(m(r, c), m(r, (c + 1) % cols));
      add_edge(m(r, c), m((r + 1) % rows, c));
    }
  }
  for (const auto& key : order) {
    h.add_pauli(coupling * multiplicity[key],
                {{key.first, Pauli::kZ}, {key.second, Pauli::kZ}});
  }
  for (int site = 0; site < rows * cols; ++site) {
    h.add_pauli(field_b, {{site, Pauli::kX}});
  }
  return h;
}

Hamiltonian build_ising_1d(int n_sites, double field_b, double coupling,
                           bool periodic) {
  if (n_sites < 2) throw std::invalid_argument("1D Ising needs >= 2 sites");
  Hamiltonian h(n_sites);
  for (int i = 0; i + 1 < n_sites; ++i) {
    h.add_pauli(coupling, {{i, Pauli::kZ}, {i + 1, Pauli::kZ}});
  }
  if (periodic && n_sites > 2) {
    h.add_pauli(coupling, {{0, Pauli::kZ}, {n_sites - 1, Pauli::kZ}});
  }
  for (int i = 0; i < n_sites; ++i) h.add_pauli(field_b, {{i, Pauli::kX}});
  return h;
}

Hamiltonian conjugate_by_rotations(const Hamiltonian& h,
                                   std::span<const Mat2> rotations) {
  if (static_cast<int>(rotations.size()) != h.n_sites()) {
    throw std::invalid_argument("one rotation per site required");
  }
  for (const Mat2& v : rotations) {
    if (!is_unitary(v)) {
      throw std::invalid_argument("conjugation needs unitary rotations");
    }
  }
  Hamiltonian out(h.n_sites());
  for (const PauliTerm& t : h.terms()) {
    std::vector<SiteOperator> factors;
    for (const SiteOperator& f : t.factors) {
      const Mat2& v = rotations[f.site];
      factors.push_back({f.site, v.adjoint() * f.matrix * v});
    }
    out.add_term(t.coefficient, std::move(factors));
  }
  return out;
}

std::vector<Chain> observable_chains(
    const AdjacencyPhaseMatrix& phi, std::span<const int> support,
    const Mat& observable, std::vector<std::pair<int, int>>* entries) {
  const int dim = 1 << support.size();
  const Vec gate = intra_support_phase_gate(phi, support, phi.n_sites());
  // sum sigma[s,r] O[r,s] with sigma = G rho' G^dagger
  //   = sum rho'[s,r] (G^dagger O G)[r,s].
  const Mat weights =
      gate.conjugate().asDiagonal() * observable * gate.asDiagonal();
  const double scale = weights.cwiseAbs().maxCoeff();
  std::vector<Chain> chains;
  if (scale == 0.0) return chains;
  for (int s = 0; s < dim; ++s) {
    for (int r = 0; r <= s; ++r) {
      Complex w = weights(r, s);
      if (std::abs(w) <= 1e-15 * scale) continue;
      if (s == r) w = w.real();
      chains.push_back(Chain{w, s != r,
                             support_entry_coefficients(phi, support, s, r)});
      if (entries) entries->emplace_back(s, r);
    }
  }
  return chains;
}

std::vector<Chain> hamiltonian_chains(const AdjacencyPhaseMatrix& phi,
                                      const Hamiltonian& h,
                                      std::vector<ChainOrigin>* origins) {
  std::vector<Chain> chains;
  const std::vector<LocalOperator> ops = h.local_operators();
  for (std::size_t o = 0; o < ops.size(); ++o) {
    const LocalOperator& op = ops[o];
    std::vector<std::pair<int, int>> entries;
    std::vector<Chain> part = observable_chains(phi, op.support, op.matrix,
                                                origins ? &entries : nullptr);
    if (origins) {
      for (const auto& [s, r] : entries) {
        origins->push_back({static_cast<int>(o), s, r});
      }
    }
    chains.insert(chains.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  return chains;
}

std::vector<Chain> mps_hamiltonian_chains(const Hamiltonian& h) {
  std::vector<Chain> chains;
  chains.reserve(h.terms().size());
  for (const PauliTerm& t : h.terms()) {
    Chain c{t.coefficient, false,
            std::vector<SiteCoefficients>(h.n_sites(), identity_coefficients())};
    for (const SiteOperator& f : t.factors) {
      c.coeffs[f.site] = c.coeffs[f.site] * f.matrix.transpose();
    }
    chains.push_back(std::move(c));
  }
  return chains;
}

double mps_energy(const MpsTensorSet& mps, const Hamiltonian& h) {
  if (h.n_sites() != mps.n_sites()) {
    throw std::invalid_argument("Hamiltonian and state sizes differ");
  }
  const double norm = mps_norm_sq(mps);
  if (!(norm > 0.0)) throw DegenerateNormError("state has zero norm");
  return contract_chains(mps, mps, mps_hamiltonian_chains(h)).real() / norm;
}

double energy(const RageState& state, const Hamiltonian& h) {
  if (h.n_sites() != state.n_sites()) {
    throw std::invalid_argument("Hamiltonian and state sizes differ");
  }
  if (!state.non_unitary_sites().empty()) {
    double total = 0.0;
    for (const LocalOperator& op : h.local_operators()) {
      total += expectation(state, op.support, op.matrix);
    }
    return total;
  }
  const double norm = mps_norm_sq(state.mps());
  if (!(norm > 0.0)) throw DegenerateNormError("state has zero norm");
  Complex numerator = 0.0;
  for (const LocalOperator& op : h.local_operators()) {
    std::vector<Mat2> factors;
    for (int j : op.support) factors.push_back(state.rotation(j));
    const Mat w = tensor_product(factors);
    numerator += contract_chains(
        state.mps(), state.mps(),
        observable_chains(state.phi(), op.support, w.adjoint() * op.matrix * w));
  }
  return numerator.real() / norm;
}

}  // namespace rage
