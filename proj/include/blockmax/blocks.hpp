#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockmax::blocks {

enum class Method { disjoint, sliding, circular };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::disjoint: return "disjoint";
    case Method::sliding: return "sliding";
    case Method::circular: return "circular";
  }
  return "?";
}

struct Scheme {
  Method method = Method::disjoint;
  int r = 1;  // block length
  int k = 1;  // aggregation parameter of the circular scheme
};

struct Series {
  Scheme scheme;
  bool repeated = false;        // one entry per used observation (not per block)
  std::size_t n_effective = 0;  // observations of the input actually used
  std::vector<double> values;
};

namespace impl {

inline void check_block_len(std::size_t n, int r, const char* who) {
  if (r < 1) throw std::invalid_argument(std::string(who) + ": r must be >= 1");
  if (static_cast<std::size_t>(r) > n)
    throw std::invalid_argument(std::string(who) + ": r exceeds the series length");
}

// Maxima of all windows of length r; monotone deque, O(n) total.
inline void sliding_window_max(std::span<const double> x, std::size_t r,
                               std::vector<double>& out) {
  std::deque<std::size_t> q;  // indices with strictly decreasing values
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (!q.empty() && x[q.back()] <= x[i]) q.pop_back();
    q.push_back(i);
    if (q.front() + r <= i) q.pop_front();
    if (i + 1 >= r) out.push_back(x[q.front()]);
  }
}

}  // namespace impl

inline Series disjoint_maxima(std::span<const double> x, int r) {
  impl::check_block_len(x.size(), r, "disjoint_maxima");
  const std::size_t rr = static_cast<std::size_t>(r);
  const std::size_t m = x.size() / rr;
  Series s{{Method::disjoint, r, 1}, false, m * rr, {}};
  s.values.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    double mx = x[i * rr];
    for (std::size_t j = 1; j < rr; ++j) mx = std::max(mx, x[i * rr + j]);
    s.values.push_back(mx);
  }
  return s;
}

// Each disjoint block maximum repeated r times: same length as the used part
// of the input.
inline Series disjoint_repeated(std::span<const double> x, int r) {
  Series d = disjoint_maxima(x, r);
  Series s{{Method::disjoint, r, 1}, true, d.n_effective, {}};
  s.values.reserve(d.n_effective);
  for (double v : d.values) s.values.insert(s.values.end(), static_cast<std::size_t>(r), v);
  return s;
}

inline Series sliding_maxima(std::span<const double> x, int r) {
  impl::check_block_len(x.size(), r, "sliding_maxima");
  Series s{{Method::sliding, r, 1}, false, x.size(), {}};
  s.values.reserve(x.size() - static_cast<std::size_t>(r) + 1);
  impl::sliding_window_max(x, static_cast<std::size_t>(r), s.values);
  return s;
}

// Circular block maxima: split the series into blocks of length k*r, extend
// each block with its own first r-1 observations, and take all k*r window
// maxima of length r inside the extended block.
inline Series circmax(std::span<const double> x, int r, int k) {
  if (r < 1) throw std::invalid_argument("circmax: r must be >= 1");
  if (k < 1) throw std::invalid_argument("circmax: k must be >= 1");
  const std::size_t len = static_cast<std::size_t>(r) * static_cast<std::size_t>(k);
  if (len > x.size())
    throw std::invalid_argument("circmax: k*r exceeds the series length");
  const std::size_t m = x.size() / len;
  Series s{{Method::circular, r, k}, true, m * len, {}};
  s.values.reserve(m * len);
  std::vector<double> ext;
  ext.reserve(len + static_cast<std::size_t>(r) - 1);
  for (std::size_t b = 0; b < m; ++b) {
    ext.assign(x.begin() + b * len, x.begin() + (b + 1) * len);
    ext.insert(ext.end(), x.begin() + b * len, x.begin() + b * len + r - 1);
    impl::sliding_window_max(ext, static_cast<std::size_t>(r), s.values);
  }
  return s;
}

// Run-length encoding per block, runs never crossing block boundaries.
// Expansion reproduces the flat series exactly; the run multiplicities of a
// block sum to block_len.
struct CompressedBlocks {
  struct Run {
    double value;
    std::int64_t count;
  };
  std::size_t block_len = 0;
  std::vector<Run> runs;                  // all blocks, in order
  std::vector<std::size_t> block_begin;   // size block_count()+1, offsets into runs

  std::size_t block_count() const {
    return block_begin.empty() ? 0 : block_begin.size() - 1;
  }
};

inline CompressedBlocks compress_groups(std::span<const double> values,
                                        std::size_t group_len) {
  if (group_len < 1) throw std::invalid_argument("compress_groups: empty group");
  if (values.empty() || values.size() % group_len != 0)
    throw std::invalid_argument(
        "compress_groups: length must be a positive multiple of the group length");
  CompressedBlocks cb;
  cb.block_len = group_len;
  const std::size_t m = values.size() / group_len;
  cb.block_begin.reserve(m + 1);
  cb.block_begin.push_back(0);
  for (std::size_t b = 0; b < m; ++b) {
    const std::size_t off = b * group_len;
    for (std::size_t i = 0; i < group_len; ++i) {
      if (i > 0 && values[off + i] == cb.runs.back().value)
        ++cb.runs.back().count;
      else
        cb.runs.push_back({values[off + i], 1});
    }
    cb.block_begin.push_back(cb.runs.size());
  }
  return cb;
}

inline CompressedBlocks compress(const Series& s) {
  if (!s.repeated)
    throw std::invalid_argument(
        "compress: expects a series with one entry per observation "
        "(circular or disjoint-repeated)");
  const std::size_t len = static_cast<std::size_t>(s.scheme.r) *
                          static_cast<std::size_t>(s.scheme.method == Method::circular
                                                       ? s.scheme.k
                                                       : 1);
  return compress_groups(s.values, len);
}

inline std::vector<double> expand(const CompressedBlocks& cb) {
  std::vector<double> out;
  out.reserve(cb.block_count() * cb.block_len);
  for (const auto& run : cb.runs)
    out.insert(out.end(), static_cast<std::size_t>(run.count), run.value);
  return out;
}

}  // namespace blockmax::blocks
