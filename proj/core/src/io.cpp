#include "qhack/io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "qhack/theory.hpp"

namespace qhack::io {

namespace {

using nlohmann::ordered_json;

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw std::runtime_error(context + ": " + what);
}

ordered_json parse_file(const std::string& path, const std::string& context) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(context, "cannot open " + path);
  try {
    return ordered_json::parse(in);
  } catch (const std::exception& e) {
    fail(context, one_line(e.what()));
  }
}

Index get_index(const ordered_json& j, const char* key, const std::string& context,
                Index fallback, bool required) {
  if (!j.contains(key)) {
    if (required) fail(context, std::string("missing field ") + key);
    return fallback;
  }
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    fail(context, std::string(key) + " must be a positive integer");
  return v.get<Index>();
}

CMatrix matrix_from_parts(const ordered_json& j, Index n, const std::string& context) {
  for (const char* key : {"re", "im"})
    if (!j.contains(key)) fail(context, std::string("missing field ") + key);
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  for (const auto* part : {&re, &im})
    if (!part->is_array() || static_cast<Index>(part->size()) != n)
      fail(context, "re/im must be " + std::to_string(n) + " rows of " +
                        std::to_string(n) + " numbers");
  CMatrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    const auto& reRow = re.at(static_cast<std::size_t>(r));
    const auto& imRow = im.at(static_cast<std::size_t>(r));
    if (!reRow.is_array() || !imRow.is_array() ||
        static_cast<Index>(reRow.size()) != n || static_cast<Index>(imRow.size()) != n)
      fail(context, "row " + std::to_string(r) + " must hold " + std::to_string(n) +
                        " numbers");
    for (Index c = 0; c < n; ++c) {
      const auto& reV = reRow.at(static_cast<std::size_t>(c));
      const auto& imV = imRow.at(static_cast<std::size_t>(c));
      if (!reV.is_number() || !imV.is_number())
        fail(context, "non-numeric entry at (" + std::to_string(r) + "," +
                          std::to_string(c) + ")");
      m(r, c) = linalg::Complex(reV.get<double>(), imV.get<double>());
    }
  }
  return m;
}

ordered_json matrix_parts(const CMatrix& m) {
  ordered_json re = ordered_json::array();
  ordered_json im = ordered_json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    ordered_json reRow = ordered_json::array();
    ordered_json imRow = ordered_json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      reRow.push_back(m(r, c).real());
      imRow.push_back(m(r, c).imag());
    }
    re.push_back(std::move(reRow));
    im.push_back(std::move(imRow));
  }
  ordered_json out;
  out["re"] = std::move(re);
  out["im"] = std::move(im);
  return out;
}

}  // namespace

UnitaryNetwork load_network(const std::string& path) {
  const std::string context = "unitary file " + path;
  const ordered_json j = parse_file(path, context);
  if (!j.is_object()) fail(context, "top-level value must be an object");
  for (const auto& [key, value] : j.items()) {
    static const char* allowed[] = {"d_a", "d_b", "d_k", "d_l", "d_0", "re", "im"};
    if (std::find_if(std::begin(allowed), std::end(allowed),
                     [&](const char* a) { return key == a; }) == std::end(allowed))
      fail(context, "unknown field " + key);
    (void)value;
  }
  const Index dA = get_index(j, "d_a", context, 0, true);
  const Index dB = get_index(j, "d_b", context, 0, true);
  const Index dK = get_index(j, "d_k", context, 0, false);
  const Index dL = get_index(j, "d_l", context, 0, false);
  const Index d0 = get_index(j, "d_0", context, 1, false);
  const Index n = dA * dB * d0;
  const CMatrix u = matrix_from_parts(j, n, context);
  try {
    return UnitaryNetwork::make(u, dA, dB, dK, dL, d0, 1e-8);
  } catch (const std::exception& e) {
    fail(context, one_line(e.what()));
  }
}

void save_network(const UnitaryNetwork& net, const std::string& path) {
  ordered_json j;
  j["d_a"] = net.dA;
  j["d_b"] = net.dB;
  j["d_k"] = net.dK;
  j["d_l"] = net.dL;
  j["d_0"] = net.d0;
  const ordered_json parts = matrix_parts(net.u);
  j["re"] = parts.at("re");
  j["im"] = parts.at("im");
  write_text(path, j.dump(2) + "\n");
}

experiments::ExperimentConfig load_experiment_config(const std::string& path) {
  const std::string context = "sweep config " + path;
  const ordered_json j = parse_file(path, context);
  if (!j.is_object()) fail(context, "top-level value must be an object");
  experiments::ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "d_a_list") {
      if (!value.is_array() || value.empty()) fail(context, "d_a_list must be a non-empty array");
      cfg.dAList.clear();
      for (const auto& v : value) {
        if (!v.is_number_integer() || v.get<long long>() < 2)
          fail(context, "d_a_list entries must be integers >= 2");
        cfg.dAList.push_back(v.get<Index>());
      }
    } else if (key == "kappa") {
      if (!value.is_number()) fail(context, "kappa must be a number");
      cfg.kappa = value.get<double>();
    } else if (key == "d_0") {
      cfg.d0 = get_index(j, "d_0", context, 1, false);
    } else if (key == "trials") {
      if (!value.is_number_integer() || value.get<long long>() < 1)
        fail(context, "trials must be a positive integer");
      cfg.trials = value.get<int>();
    } else if (key == "strategies") {
      if (!value.is_array() || value.empty())
        fail(context, "strategies must be a non-empty array of names");
      cfg.strategies.clear();
      for (const auto& v : value) {
        if (!v.is_string()) fail(context, "strategies entries must be strings");
        const auto s = strategy_from_name(v.get<std::string>());
        if (!s) fail(context, "unknown strategy " + v.get<std::string>());
        cfg.strategies.push_back(*s);
      }
    } else if (key == "master_seed") {
      if (!value.is_number_integer()) fail(context, "master_seed must be an integer");
      cfg.masterSeed = value.get<std::uint64_t>();
    } else if (key == "dim_cap") {
      cfg.dimCap = get_index(j, "dim_cap", context, cfg.dimCap, false);
    } else if (key == "optimizer") {
      if (!value.is_object()) fail(context, "optimizer must be an object");
      for (const auto& [ok, ov] : value.items()) {
        if (ok == "step_size") {
          if (!ov.is_number()) fail(context, "optimizer.step_size must be a number");
          cfg.optimizer.stepSize = ov.get<double>();
        } else if (ok == "max_iter") {
          if (!ov.is_number_integer() || ov.get<long long>() < 1)
            fail(context, "optimizer.max_iter must be a positive integer");
          cfg.optimizer.maxIter = ov.get<int>();
        } else if (ok == "convergence_tol") {
          if (!ov.is_number()) fail(context, "optimizer.convergence_tol must be a number");
          cfg.optimizer.convergenceTol = ov.get<double>();
        } else if (ok == "pinv_rel_tol") {
          if (!ov.is_number()) fail(context, "optimizer.pinv_rel_tol must be a number");
          cfg.optimizer.pinvRelTol = ov.get<double>();
        } else if (ok == "restarts") {
          if (!ov.is_number_integer() || ov.get<long long>() < 0)
            fail(context, "optimizer.restarts must be a non-negative integer");
          cfg.optimizer.restarts = ov.get<int>();
        } else {
          fail(context, "unknown optimizer field " + ok);
        }
      }
    } else {
      fail(context, "unknown field " + key);
    }
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    fail(context, one_line(e.what()));
  }
  return cfg;
}

std::string hacking_report_json(const HackingReport& report,
                                const RotatedChannel& ch, std::uint64_t seed,
                                const std::vector<double>* objectiveTrace) {
  ordered_json j;
  j["strategy"] = strategy_name(report.strategy);
  j["p_hack"] = report.pHack;
  j["iterations"] = report.iterations;
  j["residual"] = report.residual;
  j["converged"] = report.converged;
  j["seed"] = seed;
  ordered_json dims;
  dims["d_a"] = ch.dA;
  dims["d_b"] = ch.dB;
  dims["d_k"] = ch.dK;
  dims["d_l"] = ch.dL;
  dims["d_0"] = ch.d0;
  j["dims"] = std::move(dims);
  j["chi"] = matrix_parts(report.chi.chi);
  if (report.recovery.r.size() > 0) j["recovery"] = matrix_parts(report.recovery.r);
  if (objectiveTrace) j["objective_trace"] = *objectiveTrace;
  return j.dump(2) + "\n";
}

std::string theory_json(Index dA, Index dB, Index d0) {
  if (dA < 2 || dB < 2) throw std::runtime_error("theory: d_a and d_b must be >= 2");
  if (d0 < 1) throw std::runtime_error("theory: d_0 must be >= 1");
  const double kappa = static_cast<double>(dB) / static_cast<double>(dA);
  ordered_json j;
  j["d_a"] = dA;
  j["d_b"] = dB;
  j["d_0"] = d0;
  j["kappa"] = kappa;
  j["i_kappa"] = theory::i_kappa(kappa);
  j["i_kappa_approx"] = theory::i_kappa_approx(kappa);
  j["avg_p_opt"] = theory::avg_p_opt(theory::DimensionProfile{dA, dB, 0, 0, d0});
  return j.dump(2) + "\n";
}

std::string hp_json(const hacking::HpResult& res, const RotatedChannel& ch,
                    std::uint64_t seed) {
  ordered_json j;
  j["d_a"] = ch.dA;
  j["d_b"] = ch.dB;
  j["kappa"] = static_cast<double>(ch.dB) / static_cast<double>(ch.dA);
  j["seed"] = seed;
  j["p_hp"] = res.pHp;
  j["p_hack_opt"] = res.pHackOpt;
  j["predicted_from_duality"] = res.predicted;
  j["iterations"] = res.iterations;
  j["w"] = matrix_parts(res.w);
  return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qhack::io
