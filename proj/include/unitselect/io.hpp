#pragma once

// JSON input and output: study files (benefit vector plus per-group data)
// and ground-truth files (response-type distributions driving simulation).
// Every parse failure names the path of the offending node.

#include <fstream>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "unitselect/model.hpp"
#include "unitselect/oracle.hpp"
#include "unitselect/simulate.hpp"

namespace unitselect {

using json = nlohmann::ordered_json;

struct SchemaError : std::runtime_error {
  std::string path;
  SchemaError(const std::string& at, const std::string& message)
      : std::runtime_error(at + ": " + message), path(at) {}
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& member(const json& obj, const std::string& path, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path, "missing required key '" + key + "'");
  return *it;
}

inline void expect_object(const json& node, const std::string& path) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
}

inline void reject_unknown_keys(const json& obj, const std::string& path,
                                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw SchemaError(path, "unknown key '" + item.key() + "'");
  }
}

inline double number_at(const json& obj, const std::string& path, const std::string& key) {
  const json& node = member(obj, path, key);
  if (!node.is_number()) throw SchemaError(path + "." + key, "expected a number");
  return node.get<double>();
}

inline std::int64_t integer_at(const json& obj, const std::string& path, const std::string& key) {
  const json& node = member(obj, path, key);
  if (!node.is_number_integer()) throw SchemaError(path + "." + key, "expected an integer");
  return node.get<std::int64_t>();
}

inline std::string string_at(const json& obj, const std::string& path, const std::string& key) {
  const json& node = member(obj, path, key);
  if (!node.is_string()) throw SchemaError(path + "." + key, "expected a string");
  return node.get<std::string>();
}

// Enforces the one-of choice between a "probabilities" and a "counts" block.
inline const json& one_of_probabilities_counts(const json& obj, const std::string& path,
                                               bool& is_counts) {
  const bool has_probs = obj.contains("probabilities");
  const bool has_counts = obj.contains("counts");
  if (has_probs == has_counts) {
    throw SchemaError(path, "expected exactly one of 'probabilities' or 'counts'");
  }
  is_counts = has_counts;
  const std::string key = is_counts ? "counts" : "probabilities";
  const json& block = obj.at(key);
  expect_object(block, path + "." + key);
  return block;
}

}  // namespace detail

inline BenefitVector parse_benefit_vector(const json& node, const std::string& path) {
  detail::expect_object(node, path);
  detail::reject_unknown_keys(node, path, {"complier", "always_taker", "never_taker", "defier"});
  BenefitVector bv;
  bv.complier = detail::number_at(node, path, "complier");
  bv.always_taker = detail::number_at(node, path, "always_taker");
  bv.never_taker = detail::number_at(node, path, "never_taker");
  bv.defier = detail::number_at(node, path, "defier");
  return bv;
}

inline ExperimentalData parse_experimental(const json& node, const std::string& path) {
  detail::expect_object(node, path);
  detail::reject_unknown_keys(node, path, {"probabilities", "counts"});
  bool is_counts = false;
  const json& block = detail::one_of_probabilities_counts(node, path, is_counts);
  if (is_counts) {
    const std::string at = path + ".counts";
    detail::reject_unknown_keys(block, at, {"treated_n", "treated_y", "control_n", "control_y"});
    try {
      return experimental_from_counts(detail::integer_at(block, at, "treated_n"),
                                      detail::integer_at(block, at, "treated_y"),
                                      detail::integer_at(block, at, "control_n"),
                                      detail::integer_at(block, at, "control_y"));
    } catch (const InvalidCounts& e) {
      throw SchemaError(at, e.what());
    }
  }
  const std::string at = path + ".probabilities";
  detail::reject_unknown_keys(block, at, {"p_y_do_x", "p_y_do_xp"});
  ExperimentalData out;
  out.p_y_do_x = detail::number_at(block, at, "p_y_do_x");
  out.p_y_do_xp = detail::number_at(block, at, "p_y_do_xp");
  return out;
}

inline ObservationalData parse_observational(const json& node, const std::string& path) {
  detail::expect_object(node, path);
  detail::reject_unknown_keys(node, path, {"probabilities", "counts"});
  bool is_counts = false;
  const json& block = detail::one_of_probabilities_counts(node, path, is_counts);
  const std::string at = path + (is_counts ? ".counts" : ".probabilities");
  detail::reject_unknown_keys(block, at, {"xy", "xyp", "xpy", "xpyp"});
  if (is_counts) {
    try {
      return observational_from_counts(
          detail::integer_at(block, at, "xy"), detail::integer_at(block, at, "xyp"),
          detail::integer_at(block, at, "xpy"), detail::integer_at(block, at, "xpyp"));
    } catch (const InvalidCounts& e) {
      throw SchemaError(at, e.what());
    }
  }
  ObservationalData out;
  out.p_xy = detail::number_at(block, at, "xy");
  out.p_xyp = detail::number_at(block, at, "xyp");
  out.p_xpy = detail::number_at(block, at, "xpy");
  out.p_xpyp = detail::number_at(block, at, "xpyp");
  return out;
}

// Full study document. Top-level "metadata" is accepted and ignored so that
// simulator output feeds straight back into analysis commands.
inline Study parse_study(const json& root) {
  detail::expect_object(root, "$");
  detail::reject_unknown_keys(root, "$", {"benefit_vector", "groups", "metadata"});
  Study study;
  study.benefit_vector = parse_benefit_vector(detail::member(root, "$", "benefit_vector"),
                                              "$.benefit_vector");
  const json& groups = detail::member(root, "$", "groups");
  if (!groups.is_array()) throw SchemaError("$.groups", "expected an array");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::string path = "$.groups[" + std::to_string(i) + "]";
    const json& node = groups[i];
    detail::expect_object(node, path);
    detail::reject_unknown_keys(node, path, {"id", "experimental", "observational"});
    GroupData g;
    g.id = detail::string_at(node, path, "id");
    g.experimental =
        parse_experimental(detail::member(node, path, "experimental"), path + ".experimental");
    if (node.contains("observational")) {
      g.observational = parse_observational(node.at("observational"), path + ".observational");
    }
    study.groups.push_back(std::move(g));
  }
  study.validate();
  return study;
}

inline ResponseTypeDistribution parse_response_types(const json& node, const std::string& path) {
  detail::expect_object(node, path);
  detail::reject_unknown_keys(node, path, {"complier", "always_taker", "never_taker", "defier"});
  ResponseTypeDistribution rt;
  rt.complier = detail::number_at(node, path, "complier");
  rt.always_taker = detail::number_at(node, path, "always_taker");
  rt.never_taker = detail::number_at(node, path, "never_taker");
  rt.defier = detail::number_at(node, path, "defier");
  return rt;
}

struct TruthDocument {
  std::vector<GroupTruth> groups;
  std::optional<BenefitVector> benefit_vector;
};

inline TruthDocument parse_truth(const json& root) {
  detail::expect_object(root, "$");
  detail::reject_unknown_keys(root, "$", {"groups", "benefit_vector", "metadata"});
  TruthDocument doc;
  if (root.contains("benefit_vector")) {
    doc.benefit_vector = parse_benefit_vector(root.at("benefit_vector"), "$.benefit_vector");
  }
  const json& groups = detail::member(root, "$", "groups");
  if (!groups.is_array()) throw SchemaError("$.groups", "expected an array");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::string path = "$.groups[" + std::to_string(i) + "]";
    const json& node = groups[i];
    detail::expect_object(node, path);
    detail::reject_unknown_keys(node, path,
                                {"id", "response_types", "natural_choice_given_type", "joint"});
    GroupTruth g;
    g.id = detail::string_at(node, path, "id");
    const bool has_rt = node.contains("response_types");
    const bool has_joint = node.contains("joint");
    if (has_rt == has_joint) {
      throw SchemaError(path, "expected exactly one of 'response_types' or 'joint'");
    }
    if (has_joint) {
      if (node.contains("natural_choice_given_type")) {
        throw SchemaError(path, "'natural_choice_given_type' requires 'response_types'");
      }
      const json& joint = node.at("joint");
      const std::string at = path + ".joint";
      detail::expect_object(joint, at);
      detail::reject_unknown_keys(joint, at,
                                  {"complier_x", "complier_xp", "always_taker_x",
                                   "always_taker_xp", "never_taker_x", "never_taker_xp",
                                   "defier_x", "defier_xp"});
      for (std::size_t t = 0; t < 4; ++t) {
        const std::string name = kResponseTypeNames[t];
        g.truth.joint[2 * t] = detail::number_at(joint, at, name + "_x");
        g.truth.joint[2 * t + 1] = detail::number_at(joint, at, name + "_xp");
      }
    } else {
      const ResponseTypeDistribution rt =
          parse_response_types(node.at("response_types"), path + ".response_types");
      std::array<double, 4> p_natural_x{0.5, 0.5, 0.5, 0.5};
      if (node.contains("natural_choice_given_type")) {
        const json& nat = node.at("natural_choice_given_type");
        const std::string at = path + ".natural_choice_given_type";
        detail::expect_object(nat, at);
        detail::reject_unknown_keys(nat,
                                    at, {"complier", "always_taker", "never_taker", "defier"});
        for (std::size_t t = 0; t < 4; ++t) {
          p_natural_x[t] = detail::number_at(nat, at, kResponseTypeNames[t]);
        }
      }
      try {
        g.truth = GroundTruth::from_response_types(rt, p_natural_x);
      } catch (const ValidationError& e) {
        throw SchemaError(path, e.what());
      }
    }
    try {
      g.truth.validate();
    } catch (const ValidationError& e) {
      throw SchemaError(path, e.what());
    }
    doc.groups.push_back(std::move(g));
  }
  return doc;
}

inline json read_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open '" + file + "' for reading");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON in '") + file + "': " + e.what());
  }
}

inline Study load_study(const std::string& file) { return parse_study(read_json_file(file)); }

inline TruthDocument load_truth(const std::string& file) {
  return parse_truth(read_json_file(file));
}

inline json benefit_vector_to_json(const BenefitVector& bv) {
  return json{{"complier", bv.complier},
              {"always_taker", bv.always_taker},
              {"never_taker", bv.never_taker},
              {"defier", bv.defier}};
}

// Counts are written when available; they carry more information than the
// derived ratios.
inline json study_to_json(const Study& study, const json& metadata = json::object()) {
  json root;
  root["benefit_vector"] = benefit_vector_to_json(study.benefit_vector);
  root["groups"] = json::array();
  for (const GroupData& g : study.groups) {
    json node;
    node["id"] = g.id;
    if (g.experimental.counts) {
      const ArmCounts& c = *g.experimental.counts;
      node["experimental"]["counts"] = json{{"treated_n", c.treated_n},
                                            {"treated_y", c.treated_y},
                                            {"control_n", c.control_n},
                                            {"control_y", c.control_y}};
    } else {
      node["experimental"]["probabilities"] = json{{"p_y_do_x", g.experimental.p_y_do_x},
                                                   {"p_y_do_xp", g.experimental.p_y_do_xp}};
    }
    if (g.observational) {
      if (g.observational->counts) {
        const CellCounts& c = *g.observational->counts;
        node["observational"]["counts"] =
            json{{"xy", c.xy}, {"xyp", c.xyp}, {"xpy", c.xpy}, {"xpyp", c.xpyp}};
      } else {
        node["observational"]["probabilities"] = json{{"xy", g.observational->p_xy},
                                                      {"xyp", g.observational->p_xyp},
                                                      {"xpy", g.observational->p_xpy},
                                                      {"xpyp", g.observational->p_xpyp}};
      }
    }
    root["groups"].push_back(std::move(node));
  }
  if (!metadata.empty()) root["metadata"] = metadata;
  return root;
}

inline void write_json_file(const json& doc, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open '" + file + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + file + "'");
}

}  // namespace unitselect
