#ifndef ASPA_MYERS_HPP
#define ASPA_MYERS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace aspa {

/// One region of a shortest edit script, in left-to-right order.
/// Copy: a[a_start .. a_start+count) matches b[b_start .. b_start+count).
/// Delete: a[a_start .. a_start+count) is absent from b.
/// Insert: b[b_start .. b_start+count) is absent from a.
struct EditOp {
  enum class Kind : std::uint8_t { Copy, Delete, Insert };
  Kind kind = Kind::Copy;
  std::uint32_t a_start = 0;
  std::uint32_t b_start = 0;
  std::uint32_t count = 0;
};

namespace detail {

/// Linear-space Myers diff: marks unmatched elements of both sequences via
/// middle-snake divide and conquer. Total Delete+Insert count is minimal
/// (|a| + |b| - 2 * LCS).
template <typename T, typename Eq>
class MyersMarker {
 public:
  MyersMarker(std::span<const T> a, std::span<const T> b, Eq eq)
      : a_(a), b_(b), eq_(eq), a_removed_(a.size(), false), b_inserted_(b.size(), false) {
    // The forward full-trace algorithm backtracks the canonical greedy
    // alignment (deletions claim ties). Its trace costs O(D^2) memory, so
    // very distant inputs fall back to the linear-space middle-snake form,
    // which yields an equally minimal but possibly different alignment.
    if (!solve_forward(1024)) {
      std::size_t cap = a.size() + b.size() + 3;
      vf_.assign(cap, 0);
      vb_.assign(cap, 0);
      solve(0, a.size(), 0, b.size());
    }
  }

  const std::vector<bool>& removed() const { return a_removed_; }
  const std::vector<bool>& inserted() const { return b_inserted_; }

 private:
  struct Snake {
    std::size_t x0, y0, x1, y1;
    long d;
  };

  /// Classic forward D-loop with a per-layer trace; returns false when the
  /// edit distance exceeds `cap`.
  bool solve_forward(long cap) {
    const long n = static_cast<long>(a_.size());
    const long m = static_cast<long>(b_.size());
    if (n + m == 0) return true;
    cap = std::min(cap, n + m);
    const long off = cap + 1;
    std::vector<long> v(2 * static_cast<std::size_t>(cap) + 3, 0);
    std::vector<std::vector<long>> layers;  // layers[d][(k + d) / 2] = furthest x
    long found_d = -1;
    for (long d = 0; d <= cap && found_d < 0; ++d) {
      for (long k = -d; k <= d; k += 2) {
        long x;
        if (k == -d || (k != d && v[off + k - 1] < v[off + k + 1]))
          x = v[off + k + 1];
        else
          x = v[off + k - 1] + 1;
        long y = x - k;
        while (x < n && y < m && eq_(a_[x], b_[y])) ++x, ++y;
        v[off + k] = x;
        if (x == n && y == m) {
          found_d = d;
          break;
        }
      }
      std::vector<long> layer(static_cast<std::size_t>(d) + 1);
      for (long k = -d, i = 0; k <= d; k += 2, ++i) layer[static_cast<std::size_t>(i)] = v[off + k];
      layers.push_back(std::move(layer));
    }
    if (found_d < 0) return false;

    long x = n, y = m;
    for (long d = found_d; d > 0; --d) {
      const auto& prev = layers[static_cast<std::size_t>(d) - 1];
      auto prev_at = [&](long kk) { return prev[static_cast<std::size_t>((kk + d - 1) / 2)]; };
      long k = x - y;
      bool via_insert;
      if (k == -d) via_insert = true;
      else if (k == d) via_insert = false;
      else via_insert = prev_at(k - 1) < prev_at(k + 1);
      long pk = via_insert ? k + 1 : k - 1;
      long px = prev_at(pk);
      long py = px - pk;
      if (via_insert) b_inserted_[static_cast<std::size_t>(py)] = true;
      else a_removed_[static_cast<std::size_t>(px)] = true;
      x = px;
      y = py;
    }
    return true;
  }

  void solve(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
    while (a0 < a1 && b0 < b1 && eq_(a_[a0], b_[b0])) ++a0, ++b0;
    while (a1 > a0 && b1 > b0 && eq_(a_[a1 - 1], b_[b1 - 1])) --a1, --b1;
    if (a0 == a1) {
      for (std::size_t j = b0; j < b1; ++j) b_inserted_[j] = true;
      return;
    }
    if (b0 == b1) {
      for (std::size_t i = a0; i < a1; ++i) a_removed_[i] = true;
      return;
    }
    // After full prefix/suffix trimming a one-edit difference always empties
    // one side, so from here the edit distance is at least 2 and the middle
    // snake splits it strictly.
    Snake s = middle_snake(a0, a1, b0, b1);
    solve(a0, s.x0, b0, s.y0);
    solve(s.x1, a1, s.y1, b1);
  }

  Snake middle_snake(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
    const long n = static_cast<long>(a1 - a0);
    const long m = static_cast<long>(b1 - b0);
    const long delta = n - m;
    const bool odd = (delta & 1) != 0;
    const long max_d = (n + m + 1) / 2;
    const long off = max_d + 1;
    vf_[off + 1] = 0;
    vb_[off + 1] = 0;
    for (long d = 0; d <= max_d; ++d) {
      for (long k = -d; k <= d; k += 2) {
        long x;
        if (k == -d || (k != d && vf_[off + k - 1] < vf_[off + k + 1]))
          x = vf_[off + k + 1];
        else
          x = vf_[off + k - 1] + 1;
        long y = x - k;
        long x0 = x, y0 = y;
        while (x < n && y < m && eq_(a_[a0 + x], b_[b0 + y])) ++x, ++y;
        vf_[off + k] = x;
        if (odd && delta - k >= -(d - 1) && delta - k <= d - 1 &&
            vf_[off + k] + vb_[off + delta - k] >= n) {
          return Snake{a0 + static_cast<std::size_t>(x0), b0 + static_cast<std::size_t>(y0),
                       a0 + static_cast<std::size_t>(x), b0 + static_cast<std::size_t>(y), 2 * d - 1};
        }
      }
      for (long k = -d; k <= d; k += 2) {
        long x;
        if (k == -d || (k != d && vb_[off + k - 1] < vb_[off + k + 1]))
          x = vb_[off + k + 1];
        else
          x = vb_[off + k - 1] + 1;
        long y = x - k;
        long x0 = x, y0 = y;
        while (x < n && y < m && eq_(a_[a0 + n - 1 - x], b_[b0 + m - 1 - y])) ++x, ++y;
        vb_[off + k] = x;
        if (!odd && delta - k >= -d && delta - k <= d && vb_[off + k] + vf_[off + delta - k] >= n) {
          return Snake{a0 + static_cast<std::size_t>(n - x), b0 + static_cast<std::size_t>(m - y),
                       a0 + static_cast<std::size_t>(n - x0), b0 + static_cast<std::size_t>(m - y0),
                       2 * d};
        }
      }
    }
    // Unreachable: a D-path always exists for D <= n + m.
    return Snake{a0, b0, a0, b0, 0};
  }

  std::span<const T> a_;
  std::span<const T> b_;
  Eq eq_;
  std::vector<bool> a_removed_;
  std::vector<bool> b_inserted_;
  std::vector<long> vf_;
  std::vector<long> vb_;
};

}  // namespace detail

/// Shortest edit script between two sequences. Within every non-matching gap
/// the deletion precedes the insertion, so the output is canonical: a given
/// input pair always yields the same script.
template <typename T, typename Eq = std::equal_to<T>>
std::vector<EditOp> myers_ses(std::span<const T> a, std::span<const T> b, Eq eq = Eq{}) {
  detail::MyersMarker<T, Eq> marker(a, b, eq);
  const auto& removed = marker.removed();
  const auto& inserted = marker.inserted();
  std::vector<EditOp> ops;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && removed[i]) {
      std::size_t di = i;
      while (di < a.size() && removed[di]) ++di;
      ops.push_back({EditOp::Kind::Delete, static_cast<std::uint32_t>(i),
                     static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(di - i)});
      i = di;
    } else if (j < b.size() && inserted[j]) {
      std::size_t dj = j;
      while (dj < b.size() && inserted[dj]) ++dj;
      ops.push_back({EditOp::Kind::Insert, static_cast<std::uint32_t>(i),
                     static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(dj - j)});
      j = dj;
    } else {
      std::size_t ci = i, cj = j;
      while (ci < a.size() && cj < b.size() && !removed[ci] && !inserted[cj]) ++ci, ++cj;
      ops.push_back({EditOp::Kind::Copy, static_cast<std::uint32_t>(i),
                     static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(ci - i)});
      i = ci;
      j = cj;
    }
  }
  return ops;
}

template <typename T, typename Eq = std::equal_to<T>>
std::vector<EditOp> myers_ses(const std::vector<T>& a, const std::vector<T>& b, Eq eq = Eq{}) {
  return myers_ses(std::span<const T>(a.data(), a.size()), std::span<const T>(b.data(), b.size()), eq);
}

}  // namespace aspa

#endif  // ASPA_MYERS_HPP
