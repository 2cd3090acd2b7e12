#pragma once

#include <algorithm>
#include <compare>
#include <span>
#include <string>
#include <vector>

#include "selfsim/error.hpp"

namespace selfsim {

// A permutation of {0, ..., d-1} stored as its image table.
//
// Products are read left to right: p.then(q) first applies p, then q. This is
// the order in which the wreath recursion composes root permutations.
class Perm {
 public:
  Perm() = default;

  explicit Perm(std::vector<Letter> images) : img_(std::move(images)) {
    std::vector<bool> seen(img_.size(), false);
    for (Letter y : img_) {
      if (y >= img_.size() || seen[y]) {
        throw Error("not a permutation: " + to_string());
      }
      seen[y] = true;
    }
  }

  static Perm identity(std::size_t degree) {
    std::vector<Letter> img(degree);
    for (std::size_t i = 0; i < degree; ++i) {
      img[i] = static_cast<Letter>(i);
    }
    Perm p;
    p.img_ = std::move(img);
    return p;
  }

  // x -> x + 1 mod degree.
  static Perm successor_cycle(std::size_t degree) {
    std::vector<Letter> img(degree);
    for (std::size_t i = 0; i < degree; ++i) {
      img[i] = static_cast<Letter>((i + 1) % degree);
    }
    return Perm(std::move(img));
  }

  // Transposition of a and b.
  static Perm transposition(std::size_t degree, Letter a, Letter b) {
    Perm p = identity(degree);
    std::swap(p.img_[a], p.img_[b]);
    return p;
  }

  std::size_t degree() const noexcept { return img_.size(); }
  Letter operator()(Letter x) const { return img_[x]; }
  std::span<Letter const> images() const noexcept { return img_; }

  Perm then(Perm const& next) const {
    if (next.degree() != degree()) {
      throw AlphabetMismatch(degree(), next.degree());
    }
    Perm r;
    r.img_.resize(img_.size());
    for (std::size_t x = 0; x < img_.size(); ++x) {
      r.img_[x] = next.img_[img_[x]];
    }
    return r;
  }

  Perm inverse() const {
    Perm r;
    r.img_.resize(img_.size());
    for (std::size_t x = 0; x < img_.size(); ++x) {
      r.img_[img_[x]] = static_cast<Letter>(x);
    }
    return r;
  }

  // k may be negative.
  Perm pow(long k) const {
    Perm base = k < 0 ? inverse() : *this;
    unsigned long e = k < 0 ? static_cast<unsigned long>(-k)
                            : static_cast<unsigned long>(k);
    Perm r = identity(degree());
    while (e > 0) {
      if (e & 1U) {
        r = r.then(base);
      }
      base = base.then(base);
      e >>= 1U;
    }
    return r;
  }

  bool is_identity() const noexcept {
    for (std::size_t x = 0; x < img_.size(); ++x) {
      if (img_[x] != x) {
        return false;
      }
    }
    return true;
  }

  bool is_single_cycle() const {
    if (img_.empty()) {
      return false;
    }
    std::size_t len = 0;
    Letter x = 0;
    do {
      x = img_[x];
      ++len;
    } while (x != 0);
    return len == img_.size();
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < img_.size(); ++i) {
      if (i > 0) {
        s += ' ';
      }
      s += std::to_string(img_[i]);
    }
    return s + "]";
  }

  auto operator<=>(Perm const&) const = default;
  bool operator==(Perm const&) const = default;

 private:
  std::vector<Letter> img_;
};

// perm_product(s, t)(x) = t(s(x)).
inline Perm perm_product(Perm const& s, Perm const& t) { return s.then(t); }

// All permutations of {0..d-1} in lexicographic order of image tables.
inline std::vector<Perm> all_perms(std::size_t degree) {
  std::vector<Letter> img(degree);
  for (std::size_t i = 0; i < degree; ++i) {
    img[i] = static_cast<Letter>(i);
  }
  std::vector<Perm> out;
  do {
    out.emplace_back(img);
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

}  // namespace selfsim
