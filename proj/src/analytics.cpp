#include "lenctl/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "lenctl/errors.hpp"

namespace lenctl {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct Candidate {
  std::vector<std::size_t> starts;  // non-overlapping occurrences, ascending
};

std::vector<std::uint32_t> intern(const std::vector<std::string_view>& words) {
  std::unordered_map<std::string_view, std::uint32_t> ids;
  std::vector<std::uint32_t> out;
  out.reserve(words.size());
  for (auto w : words) {
    auto [it, inserted] = ids.try_emplace(w, static_cast<std::uint32_t>(ids.size()));
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::size_t> non_overlapping(const std::vector<std::size_t>& sorted_starts, std::size_t width) {
  std::vector<std::size_t> out;
  for (std::size_t p : sorted_starts) {
    if (out.empty() || p >= out.back() + width) out.push_back(p);
  }
  return out;
}

}  // namespace

RepeatVerdict detect_repetition(std::string_view text, std::size_t min_block, std::size_t k) {
  if (min_block == 0 || k < 2) throw ValidationError("repetition: need min_block >= 1 and k >= 2");
  RepeatVerdict verdict;
  const auto words = whitespace_tokens(text);
  const std::size_t n = words.size();
  if (n < 2 * min_block) return verdict;
  const auto ids = intern(words);
  const std::size_t m = min_block;

  // Rolling polynomial hash over every m-token window.
  constexpr std::uint64_t kBase = 1000003ULL;
  std::uint64_t top = 1;
  for (std::size_t i = 1; i < m; ++i) top *= kBase;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;
  std::uint64_t h = 0;
  for (std::size_t i = 0; i < m; ++i) h = h * kBase + (ids[i] + 1);
  by_hash[h].push_back(0);
  for (std::size_t s = 1; s + m <= n; ++s) {
    h = (h - (ids[s - 1] + 1) * top) * kBase + (ids[s + m - 1] + 1);
    by_hash[h].push_back(s);
  }

  const auto same_window = [&](std::size_t a, std::size_t b) {
    return std::equal(ids.begin() + static_cast<std::ptrdiff_t>(a),
                      ids.begin() + static_cast<std::ptrdiff_t>(a + m),
                      ids.begin() + static_cast<std::ptrdiff_t>(b));
  };

  std::optional<Candidate> best;
  for (auto& [hash, starts] : by_hash) {
    if (starts.size() < 2) continue;
    // Split hash buckets into classes of identical windows.
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t s : starts) {
      auto it = std::find_if(classes.begin(), classes.end(),
                             [&](const auto& c) { return same_window(c.front(), s); });
      if (it == classes.end()) {
        classes.push_back({s});
      } else {
        it->push_back(s);
      }
    }
    for (auto& cls : classes) {
      if (cls.size() < 2) continue;
      Candidate cand{non_overlapping(cls, m)};
      if (cand.starts.size() < 2) continue;
      if (!best || cand.starts.size() > best->starts.size() ||
          (cand.starts.size() == best->starts.size() && cand.starts.front() < best->starts.front())) {
        best = std::move(cand);
      }
    }
  }
  if (!best) return verdict;

  const auto& starts = best->starts;
  std::size_t len = m;
  for (;;) {
    bool ok = true;
    for (std::size_t j = 0; j < starts.size() && ok; ++j) {
      const std::size_t pos = starts[j] + len;
      ok = pos < n && ids[pos] == ids[starts.front() + len] &&
           (j + 1 == starts.size() || pos + 1 <= starts[j + 1]);
    }
    if (!ok) break;
    ++len;
  }

  std::string block;
  for (std::size_t i = 0; i < len; ++i) {
    if (i > 0) block += ' ';
    block += words[starts.front() + i];
  }
  verdict.evidence = RepeatEvidence{fnv1a64(block), starts.size(), len, starts.front()};
  verdict.repetitive = starts.size() >= k;
  return verdict;
}

RepeatVerdict detect_repetition(const Trace& trace, std::size_t min_block, std::size_t k) {
  std::string text = trace.thinking_text;
  text += ' ';
  text += trace.solution_text;
  RepeatVerdict v = detect_repetition(text, min_block, k);
  v.trace_id = trace.id;
  return v;
}

double repeat_rate(const TraceSet& traces, std::size_t min_block, std::size_t k) {
  std::size_t wrong = 0;
  std::size_t flagged = 0;
  for (const auto& t : traces.traces) {
    if (t.correct) continue;
    ++wrong;
    if (detect_repetition(t, min_block, k).repetitive) ++flagged;
  }
  if (wrong == 0) throw UndefinedRateError("repeat_rate: the trace set has no wrong answers");
  return static_cast<double>(flagged) / static_cast<double>(wrong);
}

LengthStats length_stats(const TraceSet& traces, std::int64_t bin_width) {
  if (traces.traces.empty()) throw ValidationError("length_stats: empty trace set");
  if (bin_width <= 0) throw ValidationError("length_stats: bin width must be positive");
  LengthStats s;
  s.bin_width = bin_width;
  for (const auto& t : traces.traces) {
    if (t.total_len < 0) throw ValidationError("length_stats: negative length in trace '" + t.id + "'");
    ++s.n;
    s.sum_all += t.total_len;
    if (t.correct) {
      ++s.n_correct;
      s.sum_correct += t.total_len;
    } else {
      ++s.n_wrong;
      s.sum_wrong += t.total_len;
    }
    const auto bin = static_cast<std::size_t>(t.total_len / bin_width);
    if (s.histogram.size() <= bin) s.histogram.resize(bin + 1, 0);
    ++s.histogram[bin];
  }
  s.mean_all = static_cast<double>(s.sum_all) / static_cast<double>(s.n);
  if (s.n_correct > 0) s.mean_correct = static_cast<double>(s.sum_correct) / static_cast<double>(s.n_correct);
  if (s.n_wrong > 0) s.mean_wrong = static_cast<double>(s.sum_wrong) / static_cast<double>(s.n_wrong);
  return s;
}

ThinkSolutionRatio think_solution_ratio(const Trace& trace) {
  if (trace.thinking_len < 0 || trace.solution_len < 0) {
    throw ValidationError("think_solution_ratio: negative length");
  }
  ThinkSolutionRatio r;
  r.zero_solution = trace.solution_len == 0;
  r.ratio = static_cast<double>(trace.thinking_len) /
            static_cast<double>(std::max<std::int64_t>(trace.solution_len, 1));
  return r;
}

std::size_t count_steps(std::string_view text) {
  std::size_t total = 0;
  for (std::string_view kw : kStepKeywords) {
    for (auto pos = text.find(kw); pos != std::string_view::npos; pos = text.find(kw, pos + 1)) ++total;
  }
  return total;
}

bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
  return a.accuracy >= b.accuracy && a.mean_length <= b.mean_length &&
         (a.accuracy > b.accuracy || a.mean_length < b.mean_length);
}

std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points) {
  if (points.empty()) throw ValidationError("pareto_front: no points");
  for (const auto& p : points) {
    if (!std::isfinite(p.accuracy) || !std::isfinite(p.mean_length)) {
      throw ValidationError("pareto_front: non-finite value for '" + p.label + "'");
    }
  }
  // Sweep by ascending length. A point survives iff it beats every strictly
  // shorter point on accuracy and ties the best accuracy at its own length.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].mean_length < points[b].mean_length;
  });
  std::vector<bool> keep(points.size(), false);
  double best_shorter = -INFINITY;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    double best_here = -INFINITY;
    while (j < order.size() && points[order[j]].mean_length == points[order[i]].mean_length) {
      best_here = std::max(best_here, points[order[j]].accuracy);
      ++j;
    }
    for (std::size_t q = i; q < j; ++q) {
      const double acc = points[order[q]].accuracy;
      keep[order[q]] = acc > best_shorter && acc == best_here;
    }
    best_shorter = std::max(best_shorter, best_here);
    i = j;
  }
  std::vector<ParetoPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keep[i]) out.push_back(points[i]);
  }
  return out;
}

}  // namespace lenctl
