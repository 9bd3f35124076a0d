#include "coolsim/noise.hpp"

#include <cmath>

#include "coolsim/errors.hpp"

namespace coolsim {

const char* to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::None: return "none";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Frozen: return "frozen";
    case NoiseKind::Drift: return "drift";
  }
  return "?";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  for (auto k : {NoiseKind::None, NoiseKind::Gaussian, NoiseKind::Frozen, NoiseKind::Drift})
    if (s == to_string(k)) return k;
  fail(Errc::Parse, "unknown noise kind '" + s + "'");
}

void NoiseTerm::validate() const {
  require(!id.empty(), Errc::InvalidArgument, "noise term without id");
  require(std::isfinite(std) && std >= 0.0, Errc::InvalidArgument, "noise std must be >= 0");
  require(freeze_probability >= 0.0 && freeze_probability <= 1.0, Errc::InvalidArgument,
          "freeze probability must lie in [0, 1]");
  require(freeze_min_steps > 0 && freeze_max_steps >= freeze_min_steps, Errc::InvalidArgument,
          "freeze durations must be positive and ordered");
  require(drift_amplitude >= 0.0 && drift_correlation_steps > 0.0, Errc::InvalidArgument,
          "drift amplitude must be >= 0 and correlation time > 0");
}

void NoiseSpec::validate() const {
  for (const auto& t : initial_conditions) {
    t.validate();
    require(t.kind == NoiseKind::None || t.kind == NoiseKind::Gaussian, Errc::InvalidArgument,
            "initial-condition noise on '" + t.id + "' must be gaussian");
  }
  for (const auto& t : controls) t.validate();
  for (const auto& t : measurements) t.validate();
}

bool NoiseSpec::empty() const {
  return initial_conditions.empty() && controls.empty() && measurements.empty();
}

namespace {

nlohmann::json term_json(const NoiseTerm& t) {
  nlohmann::json j{{"id", t.id}, {"kind", to_string(t.kind)}};
  switch (t.kind) {
    case NoiseKind::Gaussian: j["std"] = t.std; break;
    case NoiseKind::Frozen:
      j["probability"] = t.freeze_probability;
      j["min_steps"] = t.freeze_min_steps;
      j["max_steps"] = t.freeze_max_steps;
      break;
    case NoiseKind::Drift:
      j["amplitude"] = t.drift_amplitude;
      j["correlation_steps"] = t.drift_correlation_steps;
      break;
    case NoiseKind::None: break;
  }
  return j;
}

NoiseTerm term_from_json(const nlohmann::json& j) {
  NoiseTerm t;
  try {
    t.id = j.at("id").get<std::string>();
    t.kind = noise_kind_from_string(j.value("kind", std::string("gaussian")));
    t.std = j.value("std", 0.0);
    t.freeze_probability = j.value("probability", 0.0);
    t.freeze_min_steps = j.value("min_steps", 1);
    t.freeze_max_steps = j.value("max_steps", t.freeze_min_steps);
    t.drift_amplitude = j.value("amplitude", 0.0);
    t.drift_correlation_steps = j.value("correlation_steps", 5.0);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Parse, std::string("noise term: ") + e.what());
  }
  t.validate();
  return t;
}

std::vector<NoiseTerm> terms_from_json(const nlohmann::json& j, const char* key) {
  std::vector<NoiseTerm> out;
  if (!j.contains(key)) return out;
  for (const auto& t : j.at(key)) out.push_back(term_from_json(t));
  return out;
}

}  // namespace

nlohmann::json to_json(const NoiseSpec& n) {
  nlohmann::json j = nlohmann::json::object();
  auto put = [&](const char* key, const std::vector<NoiseTerm>& terms) {
    auto arr = nlohmann::json::array();
    for (const auto& t : terms) arr.push_back(term_json(t));
    j[key] = arr;
  };
  put("initial_conditions", n.initial_conditions);
  put("controls", n.controls);
  put("measurements", n.measurements);
  return j;
}

NoiseSpec noise_spec_from_json(const nlohmann::json& j) {
  NoiseSpec n;
  n.initial_conditions = terms_from_json(j, "initial_conditions");
  n.controls = terms_from_json(j, "controls");
  n.measurements = terms_from_json(j, "measurements");
  n.validate();
  return n;
}

NoiseChannel::NoiseChannel(std::vector<NoiseTerm> terms, std::uint64_t seed)
    : terms_(std::move(terms)), states_(terms_.size()), rng_(seed) {
  for (const auto& t : terms_) t.validate();
}

void NoiseChannel::apply(std::map<std::string, double>& values) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    auto& st = states_[i];
    const auto it = values.find(t.id);
    if (it == values.end()) fail(Errc::MissingId, "noise id '" + t.id + "' not present");
    double& v = it->second;
    switch (t.kind) {
      case NoiseKind::None: break;
      case NoiseKind::Gaussian:
        if (t.std > 0.0) v += t.std * normal(rng_);
        break;
      case NoiseKind::Frozen:
        if (st.frozen_left > 0) {
          --st.frozen_left;
          v = st.held;
        } else if (st.primed && unit(rng_) < t.freeze_probability) {
          std::uniform_int_distribution<int> dur(t.freeze_min_steps, t.freeze_max_steps);
          st.frozen_left = dur(rng_) - 1;
          v = st.held;
        } else {
          st.held = v;
        }
        st.primed = true;
        break;
      case NoiseKind::Drift: {
        const double phi = std::exp(-1.0 / t.drift_correlation_steps);
        if (st.primed) st.offset = phi * st.offset + std::sqrt(1.0 - phi * phi) * t.drift_amplitude * normal(rng_);
        st.primed = true;
        v += st.offset;
        break;
      }
    }
  }
}

}  // namespace coolsim
