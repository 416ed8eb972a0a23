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

#include "rage/chain.hpp"

namespace rage {

SiteCoefficients identity_coefficients() { return Mat2::Identity(); }

namespace {

EnvBlocks unit_blocks(int da, int db) {
  EnvBlocks blocks(static_cast<std::size_t>(da) * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < db; ++j) {
      Mat unit = Mat::Zero(da, db);
      unit(i, j) = 1.0;
      blocks[static_cast<std::size_t>(i) * db + j] = std::move(unit);
    }
  }
  return blocks;
}

// C_x = sum_y c(x, y) conj(B_y); zero rows are reported as absent.
struct BraMix {
  std::array<Mat, 2> mix;
  std::array<bool, 2> present{false, false};
};

BraMix mix_bra(const SiteCoefficients& c, const std::array<Mat, 2>& bra) {
  BraMix out;
  for (int x = 0; x < 2; ++x) {
    const Complex c0 = c(x, 0);
    const Complex c1 = c(x, 1);
    const bool has0 = c0 != Complex(0.0);
    const bool has1 = c1 != Complex(0.0);
    if (!has0 && !has1) continue;
    out.present[x] = true;
    if (has0 && has1) {
      out.mix[x] = c0 * bra[0].conjugate() + c1 * bra[1].conjugate();
    } else if (has0) {
      out.mix[x] = c0 * bra[0].conjugate();
    } else {
      out.mix[x] = c1 * bra[1].conjugate();
    }
  }
  return out;
}

}  // namespace

EnvBlocks left_boundary(const MpsTensorSet& ket, const MpsTensorSet& bra) {
  return unit_blocks(ket.left_dim(0), bra.left_dim(0));
}

EnvBlocks right_boundary(const MpsTensorSet& ket, const MpsTensorSet& bra) {
  const int last = ket.n_sites() - 1;
  return unit_blocks(ket.right_dim(last), bra.right_dim(last));
}

void absorb_left(EnvBlocks& env, const SiteCoefficients& c,
                 const std::array<Mat, 2>& ket,
                 const std::array<Mat, 2>& bra) {
  const BraMix m = mix_bra(c, bra);
  for (Mat& block : env) {
    Mat next = Mat::Zero(ket[0].cols(), bra[0].cols());
    for (int x = 0; x < 2; ++x) {
      if (!m.present[x]) continue;
      next.noalias() += ket[x].transpose() * (block * m.mix[x]);
    }
    block = std::move(next);
  }
}

void absorb_right(EnvBlocks& env, const SiteCoefficients& c,
                  const std::array<Mat, 2>& ket,
                  const std::array<Mat, 2>& bra) {
  const BraMix m = mix_bra(c, bra);
  for (Mat& block : env) {
    Mat next = Mat::Zero(ket[0].rows(), bra[0].rows());
    for (int x = 0; x < 2; ++x) {
      if (!m.present[x]) continue;
      next.noalias() += ket[x] * (block * m.mix[x].transpose());
    }
    block = std::move(next);
  }
}

Complex join(const EnvBlocks& left, const EnvBlocks& right) {
  Complex value = 0.0;
  for (std::size_t b = 0; b < left.size(); ++b) {
    value += left[b].cwiseProduct(right[b]).sum();
  }
  return value;
}

Complex contract_chain(const MpsTensorSet& ket, const MpsTensorSet& bra,
                       const std::vector<SiteCoefficients>& coeffs) {
  if (ket.n_sites() != bra.n_sites() ||
      static_cast<int>(coeffs.size()) != ket.n_sites()) {
    throw std::invalid_argument("chain length mismatch");
  }
  if (ket.boundary() != bra.boundary()) {
    throw std::invalid_argument("chain boundary mismatch");
  }
  EnvBlocks env = left_boundary(ket, bra);
  for (int k = 0; k < ket.n_sites(); ++k) {
    absorb_left(env, coeffs[k], ket.site(k), bra.site(k));
  }
  // The right boundary consists of unit blocks, so joining picks the
  // diagonal of the closing index.
  return join(env, right_boundary(ket, bra));
}

Complex contract_chains(const MpsTensorSet& ket, const MpsTensorSet& bra,
                        const std::vector<Chain>& chains) {
  Complex total = 0.0;
  for (const Chain& ch : chains) {
    const Complex v = ch.weight * contract_chain(ket, bra, ch.coeffs);
    total += ch.mirrored ? Complex(2.0 * v.real(), 0.0) : v;
  }
  return total;
}

ChainEnvironments::ChainEnvironments(const MpsTensorSet& ket,
                                     const MpsTensorSet& bra,
                                     const std::vector<Chain>& chains) {
  rebuild(ket, bra, chains);
}

void ChainEnvironments::rebuild(const MpsTensorSet& ket,
                                const MpsTensorSet& bra,
                                const std::vector<Chain>& chains) {
  n_sites_ = ket.n_sites();
  left_.assign(chains.size(), std::vector<EnvBlocks>(n_sites_ + 1));
  right_.assign(chains.size(), std::vector<EnvBlocks>(n_sites_ + 1));
  for (std::size_t c = 0; c < chains.size(); ++c) {
    left_[c][0] = left_boundary(ket, bra);
    for (int k = 0; k < n_sites_; ++k) {
      left_[c][k + 1] = left_[c][k];
      absorb_left(left_[c][k + 1], chains[c].coeffs[k], ket.site(k),
                  bra.site(k));
    }
    right_[c][n_sites_] = right_boundary(ket, bra);
    for (int k = n_sites_ - 1; k >= 0; --k) {
      right_[c][k] = right_[c][k + 1];
      absorb_right(right_[c][k], chains[c].coeffs[k], ket.site(k),
                   bra.site(k));
    }
  }
}

void ChainEnvironments::advance_left(int site, const MpsTensorSet& ket,
                                     const MpsTensorSet& bra,
                                     const std::vector<Chain>& chains) {
  for (std::size_t c = 0; c < chains.size(); ++c) {
    left_[c][site + 1] = left_[c][site];
    absorb_left(left_[c][site + 1], chains[c].coeffs[site], ket.site(site),
                bra.site(site));
  }
}

void ChainEnvironments::advance_right(int site, const MpsTensorSet& ket,
                                      const MpsTensorSet& bra,
                                      const std::vector<Chain>& chains) {
  for (std::size_t c = 0; c < chains.size(); ++c) {
    right_[c][site] = right_[c][site + 1];
    absorb_right(right_[c][site], chains[c].coeffs[site], ket.site(site),
                 bra.site(site));
  }
}

Complex ChainEnvironments::value(std::size_t chain, int site) const {
  return join(left_[chain][site], right_[chain][site]);
}

Vec flatten_site(const std::array<Mat, 2>& tensors) {
  const int dl = static_cast<int>(tensors[0].rows());
  const int dr = static_cast<int>(tensors[0].cols());
  Vec v(2 * dl * dr);
  for (int x = 0; x < 2; ++x) {
    for (int i = 0; i < dl; ++i) {
      for (int p = 0; p < dr; ++p) {
        v(site_vector_index(x, i, p, dl, dr)) = tensors[x](i, p);
      }
    }
  }
  return v;
}

std::array<Mat, 2> unflatten_site(const Vec& v, int dl, int dr) {
  if (v.size() != 2 * dl * dr) {
    throw std::invalid_argument("site vector has wrong length");
  }
  std::array<Mat, 2> out{Mat(dl, dr), Mat(dl, dr)};
  for (int x = 0; x < 2; ++x) {
    for (int i = 0; i < dl; ++i) {
      for (int p = 0; p < dr; ++p) {
        out[x](i, p) = v(site_vector_index(x, i, p, dl, dr));
      }
    }
  }
  return out;
}

Mat effective_matrix(const std::vector<Chain>& chains,
                     const ChainEnvironments& envs, int site, int dl,
                     int dr) {
  const int block = dl * dr;
  Mat out = Mat::Zero(2 * block, 2 * block);
  Mat k_mat(block, block);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const Chain& ch = chains[c];
    if (ch.weight == Complex(0.0)) continue;
    const EnvBlocks& left = envs.left(c, site);
    const EnvBlocks& right = envs.right(c, site + 1);
    // K[(j,q),(i,p)] = sum_b L_b(i,j) R_b(p,q)
    k_mat.setZero();
    for (std::size_t b = 0; b < left.size(); ++b) {
      const Mat& l = left[b];
      const Mat& r = right[b];
      for (int i = 0; i < dl; ++i) {
        for (int j = 0; j < dl; ++j) {
          const Complex lij = l(i, j);
          if (lij == Complex(0.0)) continue;
          for (int p = 0; p < dr; ++p) {
            for (int q = 0; q < dr; ++q) {
              k_mat(j * dr + q, i * dr + p) += lij * r(p, q);
            }
          }
        }
      }
    }
    const SiteCoefficients& coeff = ch.coeffs[site];
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const Complex cxy = coeff(x, y);
        if (cxy == Complex(0.0)) continue;
        const Complex w = ch.weight * cxy;
        out.block(y * block, x * block, block, block) += w * k_mat;
        if (ch.mirrored) {
          out.block(x * block, y * block, block, block) +=
              std::conj(w) * k_mat.adjoint();
        }
      }
    }
  }
  return out;
}

Vec effective_vector(const std::vector<Chain>& chains,
                     const ChainEnvironments& envs, int site,
                     const std::array<Mat, 2>& ket_site) {
  const int dl_bra = static_cast<int>(envs.left(0, site)[0].cols());
  const int dr_bra = static_cast<int>(envs.right(0, site + 1)[0].cols());
  const bool square =
      dl_bra == ket_site[0].rows() && dr_bra == ket_site[0].cols();
  std::array<Mat, 2> acc{Mat::Zero(dl_bra, dr_bra), Mat::Zero(dl_bra, dr_bra)};
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const Chain& ch = chains[c];
    if (ch.mirrored && !square) {
      throw std::invalid_argument("effective_vector: mirrored chain on a "
                                  "non-square site");
    }
    if (ch.weight == Complex(0.0)) continue;
    const EnvBlocks& left = envs.left(c, site);
    const EnvBlocks& right = envs.right(c, site + 1);
    const SiteCoefficients& coeff = ch.coeffs[site];
    for (int x = 0; x < 2; ++x) {
      bool any = false;
      for (int y = 0; y < 2; ++y) any = any || coeff(x, y) != Complex(0.0);
      if (!any) continue;
      // sum_b L_b^T A_x R_b, indexed (j, q)
      Mat sandwich = Mat::Zero(dl_bra, dr_bra);
      for (std::size_t b = 0; b < left.size(); ++b) {
        sandwich.noalias() += left[b].transpose() * ket_site[x] * right[b];
      }
      for (int y = 0; y < 2; ++y) {
        const Complex cxy = coeff(x, y);
        if (cxy != Complex(0.0)) acc[y] += ch.weight * cxy * sandwich;
      }
    }
    if (!ch.mirrored) continue;
    // M^dagger a: sum_b conj(L_b) A_y R_b^dagger into slot x.
    for (int y = 0; y < 2; ++y) {
      bool any = false;
      for (int x = 0; x < 2; ++x) any = any || coeff(x, y) != Complex(0.0);
      if (!any) continue;
      Mat sandwich = Mat::Zero(dl_bra, dr_bra);
      for (std::size_t b = 0; b < left.size(); ++b) {
        sandwich.noalias() += left[b].conjugate() * ket_site[y] * right[b].adjoint();
      }
      for (int x = 0; x < 2; ++x) {
        const Complex cxy = coeff(x, y);
        if (cxy != Complex(0.0)) acc[x] += std::conj(ch.weight * cxy) * sandwich;
      }
    }
  }
  return flatten_site(acc);
}

}  // namespace rage
