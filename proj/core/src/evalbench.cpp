#include "swarmnet/evalbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "swarmnet/errors.hpp"
#include "text.hpp"

namespace swarmnet::eval {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

HorizonStats summarize(int horizon, const EpisodeLosses& losses) {
  HorizonStats s;
  s.horizon = horizon;
  s.L = mean_std(losses.L).mean;
  std::vector<double> defined;
  for (double v : losses.Lnorm)
    if (!std::isnan(v)) defined.push_back(v);
  s.normalized_episodes = defined.size();
  if (!defined.empty()) {
    const auto ms = mean_std(defined);
    s.Lnorm_mean = ms.mean;
    s.Lnorm_std = ms.std;
  } else {
    s.Lnorm_mean = std::numeric_limits<double>::quiet_NaN();
    s.Lnorm_std = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

EvalReport failed(const std::string& dataset, const std::string& variant, std::uint64_t seed,
                  const std::string& why) {
  EvalReport r;
  r.dataset = dataset;
  r.variant = variant;
  r.seed = seed;
  r.failure = why;
  return r;
}

}  // namespace

void EvalConfig::validate() const {
  if (horizons.empty()) throw ConfigError("eval.horizons must not be empty");
  for (int h : horizons)
    if (h < 1) throw ConfigError("eval.horizons must be >= 1");
  SweepSpec{sweep_sizes, horizons, sweep_seeds}.validate();
  if (histogram_bins < 1 || histogram_step < 1) throw ConfigError("eval histogram bins and step must be >= 1");
  if (jobs < 1) throw ConfigError("eval.jobs must be >= 1");
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd m;
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double acc = 0.0;
    for (double v : values) acc += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(acc / static_cast<double>(values.size() - 1));
  }
  return m;
}

const HorizonStats* EvalReport::at(int horizon) const {
  for (const auto& r : rows)
    if (r.horizon == horizon) return &r;
  return nullptr;
}

std::vector<EpisodeLosses> episode_losses(const StepPredictor& model, std::span<const Episode> test,
                                          std::span<const int> horizons, int observed) {
  if (test.empty()) throw ConfigError("evaluation needs at least one test episode");
  if (horizons.empty()) throw ConfigError("evaluation needs at least one horizon");
  const int max_h = *std::max_element(horizons.begin(), horizons.end());
  const int tw = model.window_length();
  if (observed == 0) observed = tw;
  if (observed < tw) {
    throw ConfigError("evaluation shows " + std::to_string(observed) + " states to a model with window " +
                      std::to_string(tw));
  }
  const int offset = observed - tw;
  for (const auto& ep : test) train::trainable_windows(ep.steps - offset, tw, max_h);

  std::vector<EpisodeLosses> out(horizons.size());
  for (auto& o : out) {
    o.L.resize(test.size());
    o.Lnorm.resize(test.size());
  }
  constexpr std::size_t kChunk = 64;
  diff::NoTapeScope no_tape;
  for (std::size_t lo = 0; lo < test.size(); lo += kChunk) {
    const std::size_t hi = std::min(test.size(), lo + kChunk);
    std::vector<train::WindowRef> refs;
    for (std::size_t e = lo; e < hi; ++e) refs.push_back({e, offset});
    const auto batch = train::stack_windows(test, refs, tw, max_h);
    const auto preds = train::multistep_unroll(model, batch.windows, max_h, nullptr);
    const std::size_t frame = batch.targets.front().numel() / refs.size();
    for (std::size_t r = 0; r < refs.size(); ++r) {
      const Episode& ep = test[lo + r];
      double lbar = std::numeric_limits<double>::quiet_NaN();
      try {
        lbar = train::natural_skip(ep);
      } catch (const NormalizationUndefinedError&) {
      }
      double acc = 0.0;
      // Horizons are scored on prefixes of the same rollout.
      std::vector<double> prefix(static_cast<std::size_t>(max_h) + 1, 0.0);
      for (int j = 0; j < max_h; ++j) {
        acc += train::loss_eq4(preds[j].values().subspan(r * frame, frame),
                               batch.targets[j].values().subspan(r * frame, frame));
        prefix[static_cast<std::size_t>(j) + 1] = acc;
      }
      for (std::size_t k = 0; k < horizons.size(); ++k) {
        const int h = horizons[k];
        const double l = prefix[static_cast<std::size_t>(h)] / h;
        out[k].L[lo + r] = l;
        out[k].Lnorm[lo + r] = l / lbar;
      }
    }
  }
  return out;
}

EvalReport evaluate(const StepPredictor& model, std::span<const Episode> test, std::span<const int> horizons,
                    const std::string& dataset, const std::string& variant, std::uint64_t seed,
                    int observed) {
  const auto t0 = Clock::now();
  const auto losses = episode_losses(model, test, horizons, observed);
  EvalReport r;
  r.dataset = dataset;
  r.variant = variant;
  r.seed = seed;
  r.episodes = test.size();
  for (std::size_t k = 0; k < horizons.size(); ++k) r.rows.push_back(summarize(horizons[k], losses[k]));
  r.seconds = seconds_since(t0);
  return r;
}

EvalReport calibration(std::span<const Episode> test, int window_length, const std::string& dataset) {
  const auto t0 = Clock::now();
  if (test.empty()) throw ConfigError("calibration needs at least one test episode");
  EpisodeLosses losses;
  for (const auto& ep : test) {
    const int k = train::trainable_windows(ep.steps, window_length, 1);
    const std::size_t frame = static_cast<std::size_t>(ep.agents) * ep.state_dim;
    // Copy-last-state prediction for target t is the state at t - 1.
    const std::span<const float> states(ep.states);
    const auto first = static_cast<std::size_t>(window_length - 1);
    const double l = train::loss_eq4(states.subspan(first * frame, static_cast<std::size_t>(k) * frame),
                                     states.subspan((first + 1) * frame, static_cast<std::size_t>(k) * frame));
    losses.L.push_back(l);
    double lnorm = std::numeric_limits<double>::quiet_NaN();
    try {
      lnorm = l / train::natural_skip(ep, window_length - 1, ep.steps - 1);
    } catch (const NormalizationUndefinedError&) {
    }
    losses.Lnorm.push_back(lnorm);
  }
  EvalReport r;
  r.dataset = dataset;
  r.variant = "calibration";
  r.episodes = test.size();
  r.rows.push_back(summarize(1, losses));
  r.seconds = seconds_since(t0);
  return r;
}

void audit_disjoint(std::span<const Episode> train_set, std::span<const Episode> test) {
  std::set<std::uint64_t> seen;
  for (const auto& ep : train_set) seen.insert(ep.seed);
  for (const auto& ep : test) {
    if (seen.contains(ep.seed)) {
      throw ConfigError("test episode with seed " + std::to_string(ep.seed) + " also occurs in the training data");
    }
  }
}

std::vector<VariantSpec> ablation_variants() {
  using model::TemporalEncoder;
  return {
      {"decoder", TemporalEncoder::markov, false, false},
      {"decoder(context)", TemporalEncoder::markov, true, false},
      {"decoder+conv1d", TemporalEncoder::conv1d, false, false},
      {"decoder+conv1d(context)", TemporalEncoder::conv1d, true, false},
      {"swarmnet(context)", TemporalEncoder::conv1d, true, true},
  };
}

VariantSpec find_variant(const std::string& name) {
  for (auto& v : ablation_variants())
    if (v.name == name) return v;
  throw ConfigError("unknown variant '" + name + "'");
}

void apply_variant(const VariantSpec& v, model::SwarmNetConfig& m, train::TrainConfig& t) {
  m.temporal_encoder = v.encoder;
  m.use_context = v.use_context;
  t.curriculum = v.curriculum;
  if (!v.curriculum) t.horizon = t.max_horizon;
}

std::vector<EvalReport> ablation_suite(const AblationInput& in, std::span<const VariantSpec> variants) {
  audit_disjoint(in.train, in.test);
  int observed = 1;
  for (const auto& v : variants) {
    model::SwarmNetConfig m = in.model;
    m.temporal_encoder = v.encoder;
    observed = std::max(observed, m.window_length());
  }
  std::vector<EvalReport> reports;
  reports.push_back(calibration(in.test, observed, in.dataset));
  const model::CopyLastState copy(observed, in.model.state_dim, in.model.context_dim);
  reports.push_back(evaluate(copy, in.test, in.horizons, in.dataset, "copy-baseline"));

  std::vector<EvalReport> rows(variants.size());
  parallel_for(variants.size(), in.jobs, [&](std::size_t i) {
    const auto& v = variants[i];
    try {
      model::SwarmNetConfig m = in.model;
      train::TrainConfig t = in.train_cfg;
      apply_variant(v, m, t);
      const auto t0 = Clock::now();
      auto result = train::train(in.train, m, t);
      rows[i] = evaluate(result.model, in.test, in.horizons, in.dataset, v.name, t.seed, observed);
      rows[i].seconds = seconds_since(t0);
    } catch (const Error& e) {
      rows[i] = failed(in.dataset, v.name, in.train_cfg.seed, e.what());
    }
  });
  reports.insert(reports.end(), rows.begin(), rows.end());
  return reports;
}

void SweepSpec::validate() const {
  if (sizes.empty() || horizons.empty()) throw ConfigError("sweep needs sizes and horizons");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2) throw ConfigError("sweep sizes must be >= 2");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw ConfigError("sweep sizes must be ascending");
  }
  for (int h : horizons)
    if (h < 1) throw ConfigError("sweep horizons must be >= 1");
  if (seeds < 1) throw ConfigError("sweep needs at least one seed per cell");
}

std::vector<EvalReport> sample_size_sweep(const SweepSpec& spec, const DatasetFactory& make,
                                          std::uint64_t base_seed, std::span<const Episode> test,
                                          const model::SwarmNetConfig& model_cfg,
                                          const train::TrainConfig& train_cfg, const std::string& dataset,
                                          int jobs) {
  spec.validate();
  const std::size_t cells = spec.sizes.size() * static_cast<std::size_t>(spec.seeds);
  std::vector<EvalReport> out(cells);
  parallel_for(cells, jobs, [&](std::size_t c) {
    const int size = spec.sizes[c / static_cast<std::size_t>(spec.seeds)];
    const auto s = static_cast<std::uint64_t>(c % static_cast<std::size_t>(spec.seeds));
    const std::string name = "n=" + std::to_string(size);
    train::TrainConfig t = train_cfg;
    t.seed = train_cfg.seed + s;
    try {
      const auto t0 = Clock::now();
      const auto data = make(size, base_seed);
      audit_disjoint(data, test);
      auto result = train::train(data, model_cfg, t);
      out[c] = evaluate(result.model, test, spec.horizons, dataset, name, t.seed);
      out[c].seconds = seconds_since(t0);
    } catch (const Error& e) {
      out[c] = failed(dataset, name, t.seed, e.what());
    }
  });
  return out;
}

std::string report_csv(std::span<const EvalReport> reports) {
  using detail::num;
  std::ostringstream out;
  out << "dataset,variant,horizon,seed,L,Lnorm_mean,Lnorm_std,episodes,seconds\n";
  for (const auto& r : reports) {
    if (!r.failure.empty()) {
      out << r.dataset << ",\"" << r.variant << " [failed]\",,"<< r.seed << ",nan,nan,nan,0,0\n";
      continue;
    }
    for (const auto& h : r.rows) {
      out << r.dataset << ",\"" << r.variant << "\"," << h.horizon << ',' << r.seed << ',' << num(h.L) << ','
          << num(h.Lnorm_mean) << ',' << num(h.Lnorm_std) << ',' << r.episodes << ',' << num(r.seconds) << '\n';
    }
  }
  return out.str();
}

std::string report_table(std::span<const EvalReport> reports) {
  std::vector<int> horizons;
  for (const auto& r : reports)
    for (const auto& h : r.rows)
      if (std::find(horizons.begin(), horizons.end(), h.horizon) == horizons.end()) horizons.push_back(h.horizon);
  std::sort(horizons.begin(), horizons.end());

  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-26s", "variant");
  out << buf;
  for (int h : horizons) {
    std::snprintf(buf, sizeof buf, "%24s", ("h=" + std::to_string(h) + " Lnorm").c_str());
    out << buf;
  }
  out << "   (mean +- std over episodes)\n";
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-26s", r.variant.c_str());
    out << buf;
    if (!r.failure.empty()) {
      out << "  failed: " << r.failure << '\n';
      continue;
    }
    for (int h : horizons) {
      const auto* s = r.at(h);
      if (s == nullptr) {
        std::snprintf(buf, sizeof buf, "%24s", "-");
      } else {
        std::snprintf(buf, sizeof buf, "%12.4g +- %-8.3g", s->Lnorm_mean, s->Lnorm_std);
      }
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

double sign_test_p(int wins, int trials) {
  if (trials < 1 || wins < 0 || wins > trials) throw ParameterError("sign test needs 0 <= wins <= trials, trials >= 1");
  double p = 0.0;
  for (int k = wins; k <= trials; ++k) {
    p += std::exp(std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0) -
                  trials * std::log(2.0));
  }
  return std::min(1.0, p);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard lock(mu);
          if (next >= count || error) return;
          i = next++;
        }
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace swarmnet::eval
