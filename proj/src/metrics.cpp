#include "ec/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace ec::metrics {

double optimality_gap(double v, double v_star) {
  if (!(v_star > 0.0)) throw Error("NonPositiveOptimum", "optimality gap needs a positive optimum");
  return v / v_star - 1.0;
}

double shifted_gap(double v, double v_star) {
  if (v_star > 0.0) return optimality_gap(v, v_star);
  const double shift = 1.0 - v_star;
  return optimality_gap(v + shift, v_star + shift);
}

double improvement_over_baseline(double v_b, double v) {
  if (!(v > 0.0)) throw Error("NonPositiveValue", "improvement needs a positive objective");
  return v_b / v - 1.0;
}

double expected_generations(double p) {
  double z = 0.0;
  for (int k = 1; k <= 5; ++k) z += k * std::pow(1.0 - p, k - 1) * p;
  return z + 6.0 * std::pow(1.0 - p, 5);
}

double estimate_p(double z) {
  if (!(z >= 1.0 && z <= 6.0)) throw Error("OutOfRange", "mean generations must lie in [1, 6]");
  if (z == 1.0) return 1.0;
  if (z == 6.0) return 0.0;
  // expected_generations falls strictly from 6 at p = 0 to 1 at p = 1.
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (expected_generations(mid) > z) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::array<double, 5> debug_distribution(double q) {
  std::array<double, 5> y{};
  double head = 0.0;
  for (int k = 0; k < 4; ++k) {
    y[k] = std::pow(1.0 - q, k) * q;
    head += y[k];
  }
  y[4] = 1.0 - head;
  return y;
}

double estimate_q(const std::array<double, 5>& y) {
  double sum = 0.0;
  for (double v : y) {
    if (!(v >= 0.0)) throw Error("BadInput", "frequencies must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("BadInput", "frequencies must sum to 1");
  int best = 0;
  double best_mse = INFINITY;
  for (int i = 0; i <= 100; ++i) {
    const auto yh = debug_distribution(i / 100.0);
    double mse = 0.0;
    for (int k = 0; k < 5; ++k) mse += (y[k] - yh[k]) * (y[k] - yh[k]);
    mse /= 5.0;
    if (mse < best_mse) {
      best_mse = mse;
      best = i;
    }
  }
  return best / 100.0;
}

nlohmann::ordered_json to_json(const EvalRecord& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["kind"] = problems::to_string(r.kind);
  j["index"] = r.index;
  j["seed"] = r.seed;
  j["phase"] = r.phase;
  j["failure_code"] = r.failure_code;
  j["compiled"] = r.compiled;
  j["correct"] = r.correct;
  j["explained"] = r.explained;
  j["v"] = opt(r.v);
  j["v_star"] = opt(r.v_star);
  j["v_b"] = opt(r.v_b);
  j["gap"] = opt(r.gap);
  j["improvement"] = opt(r.improvement);
  j["samples_used"] = r.samples_used;
  j["debug_iterations"] = r.debug_iterations;
  j["generations_to_success"] = r.generations_to_success;
  j["adapter_completions"] = r.adapter_completions;
  return j;
}

std::vector<SummaryRow> summarize(const std::vector<EvalRecord>& records) {
  std::vector<SummaryRow> rows;
  for (auto kind : problems::kAllKinds) {
    SummaryRow row{kind};
    double gap_sum = 0.0, samples = 0.0, debug = 0.0;
    std::size_t compiled = 0, correct = 0, explained = 0, gaps = 0;
    for (const auto& r : records) {
      if (r.kind != kind) continue;
      ++row.n;
      compiled += r.compiled;
      correct += r.correct;
      explained += r.explained;
      samples += static_cast<double>(r.samples_used);
      debug += static_cast<double>(r.debug_iterations);
      if (r.gap) {
        gap_sum += *r.gap;
        ++gaps;
      }
    }
    if (row.n == 0) continue;
    const double n = static_cast<double>(row.n);
    row.compiled_rate = compiled / n;
    row.correct_rate = correct / n;
    row.explained_rate = explained / n;
    if (gaps) row.mean_gap = gap_sum / static_cast<double>(gaps);
    row.mean_samples = samples / n;
    row.mean_debug_iters = debug / n;
    rows.push_back(row);
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "kind,n,compiled_rate,correct_rate,explained_rate,mean_gap,mean_samples,mean_debug_iters\n";
  char buf[512];
  for (const auto& r : rows) {
    char gap[64] = "NA";
    if (r.mean_gap) std::snprintf(gap, sizeof gap, "%.6f", std::abs(*r.mean_gap) < 5e-7 ? 0.0 : *r.mean_gap);
    std::snprintf(buf, sizeof buf, "%s,%zu,%.4f,%.4f,%.4f,%s,%.4f,%.4f\n", problems::to_string(r.kind).c_str(), r.n,
                  r.compiled_rate, r.correct_rate, r.explained_rate, gap, r.mean_samples, r.mean_debug_iters);
    out += buf;
  }
  return out;
}

SuccessHistogram histogram(const std::vector<EvalRecord>& records) {
  SuccessHistogram h;
  double gen = 0.0;
  for (const auto& r : records) {
    ++h.episodes;
    gen += static_cast<double>(r.generations_to_success);
    if (r.compiled && r.debug_iterations > 0) {
      ++h.repaired;
      h.y[std::min<std::size_t>(r.debug_iterations, 5) - 1] += 1.0;
    }
  }
  if (h.repaired)
    for (auto& v : h.y) v /= static_cast<double>(h.repaired);
  if (h.episodes) h.z = gen / static_cast<double>(h.episodes);
  return h;
}

nlohmann::ordered_json estimates_json(const BenchmarkResult& result) {
  nlohmann::ordered_json j;
  j["episodes"] = result.histogram.episodes;
  j["mean_generations"] = result.histogram.z;
  j["repaired_episodes"] = result.histogram.repaired;
  j["debug_frequencies"] = result.histogram.y;
  j["p_hat"] = result.p_hat ? nlohmann::ordered_json(*result.p_hat) : nlohmann::ordered_json(nullptr);
  j["q_hat"] = result.q_hat ? nlohmann::ordered_json(*result.q_hat) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace ec::metrics
