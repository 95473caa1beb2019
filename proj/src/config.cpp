#include "lsm/config.hpp"

#include <cstdio>

#include "lsm/errors.hpp"
#include "lsm/parallel.hpp"
#include "lsm/rng.hpp"

namespace lsm {

namespace {

using json = nlohmann::json;

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
  throw ValidationError("unknown key '" + key + "' in " + section);
}

void parse_synthetic(const json& j, SyntheticSection& s) {
  for (const auto& [key, value] : j.items()) {
    if (key == "n_classes") {
      s.spec.n_classes = value.get<std::size_t>();
    } else if (key == "n_channels") {
      s.spec.n_channels = value.get<std::size_t>();
    } else if (key == "samples_per_class") {
      s.spec.samples_per_class = value.get<std::size_t>();
    } else if (key == "duration_ms") {
      s.spec.duration_ms = value.get<double>();
    } else if (key == "n_segments") {
      s.spec.n_segments = value.get<std::size_t>();
    } else if (key == "jitter_ms") {
      s.spec.jitter_ms = value.get<double>();
    } else if (key == "rate_scale_min") {
      s.spec.rate_scale_min = value.get<double>();
    } else if (key == "rate_scale_max") {
      s.spec.rate_scale_max = value.get<double>();
    } else if (key == "seed") {
      s.seed = value.get<std::uint64_t>();
    } else if (key == "base_rate_hz") {
      s.templates.base_rate_hz = value.get<double>();
    } else if (key == "contrast") {
      s.templates.contrast = value.get<double>();
    } else if (key == "segment_contrast") {
      s.templates.segment_contrast = value.get<double>();
    } else if (key == "shared_fraction") {
      s.templates.shared_fraction = value.get<double>();
    } else if (key == "rates_hz") {
      s.spec.rates_hz = value.get<std::vector<double>>();
      s.explicit_rates = true;
    } else {
      unknown_key("dataset.synthetic", key);
    }
  }
}

void parse_sections(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else if (key == "dataset") {
      for (const auto& [dk, dv] : value.items()) {
        if (dk == "path") {
          c.dataset_path = dv.get<std::string>();
        } else if (dk == "synthetic") {
          parse_synthetic(dv, c.synthetic);
        } else {
          unknown_key("dataset", dk);
        }
      }
    } else if (key == "reservoir") {
      json params = json::object();
      for (const auto& [rk, rv] : value.items()) {
        if (rk == "file") {
          c.reservoir_file = rv.get<std::string>();
        } else if (rk == "input_channels") {
          c.input_channels = rv.get<std::size_t>();
        } else if (rk == "fan_out") {
          c.fan_out = rv.get<std::size_t>();
        } else {
          if (rk == "seed") c.reservoir_seed_set = true;
          params[rk] = rv;
        }
      }
      from_json(params, c.reservoir);
    } else if (key == "kernel") {
      from_json(value, c.kernel);
    } else if (key == "lif") {
      from_json(value, c.lif);
    } else if (key == "readout") {
      json rest = json::object();
      for (const auto& [rk, rv] : value.items()) {
        if (rk == "n_folds") {
          c.n_folds = rv.get<std::size_t>();
        } else {
          rest[rk] = rv;
        }
      }
      from_json(rest, c.readout);
    } else if (key == "sweep") {
      for (const auto& [sk, sv] : value.items()) {
        if (sk == "alpha_in_values") {
          c.alpha_in_values = sv.get<std::vector<double>>();
        } else if (sk == "alpha_res_values") {
          c.alpha_res_values = sv.get<std::vector<double>>();
        } else if (sk == "operating_point") {
          for (const auto& [ok, ov] : sv.items()) {
            if (ok == "alpha_in") {
              c.operating_point.alpha_in = ov.get<double>();
            } else if (ok == "alpha_res") {
              c.operating_point.alpha_res = ov.get<double>();
            } else {
              unknown_key("sweep.operating_point", ok);
            }
          }
        } else if (sk == "orders") {
          c.orders.clear();
          for (const auto& o : sv) c.orders.push_back(parse_synapse_order(o.get<std::string>()));
        } else if (sk == "taus_ms") {
          c.taus_ms = sv.get<std::vector<double>>();
        } else if (sk == "band_size") {
          c.band_size = sv.get<std::size_t>();
        } else {
          unknown_key("sweep", sk);
        }
      }
    } else if (key == "output_dir") {
      c.output_dir = value.get<std::string>();
    } else if (key == "threads") {
      c.threads = value.get<unsigned>();
    } else {
      unknown_key("config", key);
    }
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!reservoir_file) reservoir.validate();
  kernel.validate();
  LifParams l = lif;
  l.dt_ms = kernel.dt_ms;
  l.validate();
  readout.validate();
  operating_point.validate();
  if (n_folds < 2) throw ValidationError("readout.n_folds must be at least 2");
  if (fan_out % 2 != 0) throw ValidationError("reservoir.fan_out must be even");
  if (!dataset_path) synthetic_spec().validate();
  sweep_config().validate();
  if (orders.empty()) throw ValidationError("sweep.orders must be nonempty");
  if (taus_ms.empty()) throw ValidationError("sweep.taus_ms must be nonempty");
  if (band_size == 0) throw ValidationError("sweep.band_size must be positive");
}

std::uint64_t RunConfig::effective_reservoir_seed() const {
  return reservoir_seed_set ? reservoir.seed : derive_seed(seed, stream::kReservoir);
}

std::uint64_t RunConfig::effective_dataset_seed() const {
  return synthetic.seed ? *synthetic.seed : seed;
}

std::uint64_t RunConfig::wiring_seed() const { return effective_reservoir_seed(); }

unsigned RunConfig::effective_threads() const {
  return threads > 0 ? threads : default_thread_count();
}

SyntheticSpec RunConfig::synthetic_spec() const {
  SyntheticSpec spec = synthetic.spec;
  spec.seed = effective_dataset_seed();
  if (!synthetic.explicit_rates) {
    TemplateParams tp = synthetic.templates;
    tp.seed = spec.seed;
    spec.rates_hz = make_class_templates(spec.n_classes, spec.n_channels, spec.n_segments, tp);
  }
  return spec;
}

SweepConfig RunConfig::sweep_config() const {
  SweepConfig s;
  s.alpha_in_values = alpha_in_values;
  s.alpha_res_values = alpha_res_values;
  s.kernel = kernel;
  s.lif = lif;
  s.lif.dt_ms = kernel.dt_ms;
  s.readout = readout;
  s.n_folds = n_folds;
  s.seed = seed;
  s.threads = effective_threads();
  return s;
}

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  // Defaults mirror the benchmark's calibrated synthetic spec.
  const SyntheticSpec defaults = default_synthetic_spec();
  c.synthetic.spec = defaults;
  c.synthetic.spec.rates_hz.clear();
  try {
    parse_sections(j, c);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid config value: ") + e.what());
  }
  c.validate();
  return c;
}

json config_echo(const RunConfig& c) {
  json dataset;
  if (c.dataset_path) {
    dataset["path"] = *c.dataset_path;
  } else {
    const auto& s = c.synthetic.spec;
    json syn{{"n_classes", s.n_classes},
             {"n_channels", s.n_channels},
             {"samples_per_class", s.samples_per_class},
             {"duration_ms", s.duration_ms},
             {"n_segments", s.n_segments},
             {"jitter_ms", s.jitter_ms},
             {"rate_scale_min", s.rate_scale_min},
             {"rate_scale_max", s.rate_scale_max},
             {"seed", c.effective_dataset_seed()}};
    if (c.synthetic.explicit_rates) {
      syn["rates_hz"] = s.rates_hz;
    } else {
      syn["base_rate_hz"] = c.synthetic.templates.base_rate_hz;
      syn["contrast"] = c.synthetic.templates.contrast;
      syn["segment_contrast"] = c.synthetic.templates.segment_contrast;
      syn["shared_fraction"] = c.synthetic.templates.shared_fraction;
    }
    dataset["synthetic"] = syn;
  }
  json reservoir;
  if (c.reservoir_file) {
    reservoir["file"] = *c.reservoir_file;
  } else {
    ReservoirParams p = c.reservoir;
    p.seed = c.effective_reservoir_seed();
    reservoir = p;
    reservoir["input_channels"] = c.input_channels;
    reservoir["fan_out"] = c.fan_out;
  }
  json readout = c.readout;
  readout["n_folds"] = c.n_folds;
  json orders = json::array();
  for (auto o : c.orders) orders.push_back(std::string(to_string(o)));
  return json{{"seed", c.seed},
              {"dataset", dataset},
              {"reservoir", reservoir},
              {"kernel", c.kernel},
              {"lif", c.lif},
              {"readout", readout},
              {"sweep",
               {{"alpha_in_values", c.alpha_in_values},
                {"alpha_res_values", c.alpha_res_values},
                {"operating_point",
                 {{"alpha_in", c.operating_point.alpha_in}, {"alpha_res", c.operating_point.alpha_res}}},
                {"orders", orders},
                {"taus_ms", c.taus_ms},
                {"band_size", c.band_size}}}};
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("override '" + assignment + "' must look like key.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ValidationError("override '" + assignment + "' has an empty key");
    if (!node->is_object()) {
      if (!node->is_null()) throw ValidationError("override '" + assignment + "' descends into a value");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lsm
