#include "sl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

namespace sl::cli {

using nlohmann::json;

InputError::InputError(std::string name, const std::string& detail)
    : std::runtime_error(name + ": " + detail), name_(std::move(name)) {}

namespace {

struct RawOpinion {
  std::string actor;
  BeliefMap belief;
  double uncertainty;
  std::vector<double> base_rate;
};

struct RawDocument {
  Domain domain;
  std::vector<RawOpinion> opinions;
};

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError("ParseError", e.what());
  }
}

const json& field(const json& object, const char* key) {
  if (!object.is_object()) throw InputError("ParseError", "expected an object");
  auto it = object.find(key);
  if (it == object.end()) throw InputError("ParseError", std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& value, const char* what) {
  if (!value.is_number()) throw InputError("ParseError", std::string(what) + " must be a number");
  return value.get<double>();
}

std::string string(const json& value, const char* what) {
  if (!value.is_string()) throw InputError("ParseError", std::string(what) + " must be a string");
  return value.get<std::string>();
}

Domain parse_domain(const json& doc) {
  const auto& labels = field(doc, "domain");
  if (!labels.is_array()) throw InputError("ParseError", "'domain' must be a list of labels");
  std::vector<std::string> names;
  for (const auto& label : labels) names.push_back(string(label, "domain label"));
  try {
    return Domain(std::move(names));
  } catch (const Error& e) {
    throw InputError(std::string(to_string(e.code())), e.what());
  }
}

ValueSet parse_set(const json& value, const Domain& domain) {
  if (!value.is_array()) throw InputError("ParseError", "'set' must be a list of labels");
  ValueSet set;
  for (const auto& item : value) {
    const auto label = string(item, "set member");
    const auto index = domain.index_of(label);
    if (!index) throw InputError("InvalidKey", "unknown label '" + label + "'");
    if (set.contains(*index)) throw InputError("ParseError", "duplicate label '" + label + "' in set");
    set = set | ValueSet::singleton(*index);
  }
  return set;
}

json format_set(ValueSet set, const Domain& domain) {
  json out = json::array();
  for (auto index : set.members()) out.push_back(domain.label(index));
  return out;
}

std::vector<double> parse_base_rate(const json& record, const Domain& domain) {
  auto it = record.find("base_rate");
  if (it == record.end()) return BaseRate::uniform(domain.size()).values();
  if (!it->is_object()) throw InputError("ParseError", "'base_rate' must map labels to numbers");
  std::vector<double> rates(domain.size(), 0.0);
  std::vector<bool> seen(domain.size(), false);
  for (const auto& [label, value] : it->items()) {
    const auto index = domain.index_of(label);
    if (!index) throw InputError("ParseError", "unknown label '" + label + "' in base rate");
    rates[*index] = number(value, "base rate");
    seen[*index] = true;
  }
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (!seen[i]) throw InputError("ParseError", "base rate is missing label '" + domain.label(i) + "'");
  }
  return rates;
}

json format_base_rate(const BaseRate& a, const Domain& domain) {
  json out = json::object();
  for (std::size_t i = 0; i < domain.size(); ++i) out[domain.label(i)] = a[i];
  return out;
}

// Reads a list of {set, <value_key>} entries into a map keyed by value set.
BeliefMap parse_entries(const json& list, const Domain& domain, const char* value_key) {
  if (!list.is_array()) throw InputError("ParseError", "belief/evidence entries must be a list");
  BeliefMap out;
  for (const auto& entry : list) {
    const auto set = parse_set(field(entry, "set"), domain);
    const double value = number(field(entry, value_key), value_key);
    if (!out.emplace(set, value).second) {
      throw InputError("ParseError", "set " + domain.format(set) + " listed twice");
    }
  }
  return out;
}

json format_entries(const BeliefMap& values, const Domain& domain, const char* value_key) {
  json out = json::array();
  for (const auto& [set, value] : values) out.push_back({{"set", format_set(set, domain)}, {value_key, value}});
  return out;
}

const json& records(const json& doc, const char* key) {
  const auto& list = field(doc, key);
  if (!list.is_array()) throw InputError("ParseError", std::string("'") + key + "' must be a list");
  if (list.empty()) throw InputError("EmptyInput", std::string("'") + key + "' is empty");
  return list;
}

std::string actor_name(const json& record, std::set<std::string>& seen) {
  auto actor = string(field(record, "actor"), "actor");
  if (!seen.insert(actor).second) throw InputError("DuplicateActor", "actor '" + actor + "' appears twice");
  return actor;
}

RawDocument parse_raw(std::string_view text) {
  const auto doc = parse_json(text);
  RawDocument raw{parse_domain(doc), {}};
  std::set<std::string> actors;
  for (const auto& record : records(doc, "opinions")) {
    RawOpinion op;
    op.actor = actor_name(record, actors);
    op.belief = parse_entries(field(record, "belief"), raw.domain, "mass");
    op.uncertainty = number(field(record, "uncertainty"), "uncertainty");
    op.base_rate = parse_base_rate(record, raw.domain);
    raw.opinions.push_back(std::move(op));
  }
  return raw;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("ParseError", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool emit(const std::string& text, const std::optional<std::string>& path, std::ostream& out, std::ostream& err) {
  if (!path) {
    out << text;
    return true;
  }
  std::ofstream file(*path, std::ios::binary);
  file << text;
  if (!file) {
    err << "error: cannot write '" << *path << "'\n";
    return false;
  }
  return true;
}

}  // namespace

OpinionFile parse_opinion_file(std::string_view text) {
  auto raw = parse_raw(text);
  OpinionFile file{raw.domain, {}};
  for (auto& op : raw.opinions) {
    try {
      file.opinions.push_back({op.actor, Opinion(raw.domain, std::move(op.belief), op.uncertainty, BaseRate(op.base_rate))});
    } catch (const Error& e) {
      throw InputError(std::string(to_string(e.code())), "actor '" + op.actor + "': " + e.what());
    }
  }
  return file;
}

std::vector<Violation> check_opinion_file(std::string_view text) {
  const auto raw = parse_raw(text);
  std::vector<Violation> out;
  for (const auto& op : raw.opinions) {
    if (auto err = validate(raw.domain, op.belief, op.uncertainty, op.base_rate)) {
      out.push_back({op.actor, std::string(to_string(err->code())), err->what()});
    }
  }
  return out;
}

EvidenceFile parse_evidence_file(std::string_view text) {
  const auto doc = parse_json(text);
  EvidenceFile file{parse_domain(doc), {}};
  std::set<std::string> actors;
  for (const auto& record : records(doc, "evidence")) {
    auto actor = actor_name(record, actors);
    auto r = parse_entries(field(record, "r"), file.domain, "value");
    const auto rates = parse_base_rate(record, file.domain);
    auto w = record.find("W");
    const double weight = w == record.end() ? kDefaultPriorWeight : number(*w, "W");
    try {
      file.records.push_back({actor, EvidenceRecord(file.domain, std::move(r), BaseRate(rates), weight)});
    } catch (const Error& e) {
      throw InputError(std::string(to_string(e.code())), "actor '" + actor + "': " + e.what());
    }
  }
  return file;
}

std::string format_opinion_file(const OpinionFile& file, bool with_projection) {
  json doc;
  doc["domain"] = file.domain.labels();
  doc["opinions"] = json::array();
  for (const auto& [actor, op] : file.opinions) {
    json record;
    record["actor"] = actor;
    record["belief"] = format_entries(op.belief(), file.domain, "mass");
    record["uncertainty"] = op.uncertainty();
    record["base_rate"] = format_base_rate(op.base_rate(), file.domain);
    if (with_projection) {
      try {
        const auto p = project_probability_hyper(op);
        json projected = json::object();
        for (std::size_t i = 0; i < p.size(); ++i) projected[file.domain.label(i)] = p[i];
        record["projected"] = projected;
      } catch (const Error&) {
        record["projected"] = nullptr;
      }
    }
    doc["opinions"].push_back(std::move(record));
  }
  return doc.dump(2) + "\n";
}

std::string format_evidence_file(const EvidenceFile& file) {
  json doc;
  doc["domain"] = file.domain.labels();
  doc["evidence"] = json::array();
  for (const auto& [actor, ev] : file.records) {
    doc["evidence"].push_back({{"actor", actor},
                               {"r", format_entries(ev.evidence(), file.domain, "value")},
                               {"base_rate", format_base_rate(ev.base_rate(), file.domain)},
                               {"W", ev.prior_weight()}});
  }
  return doc.dump(2) + "\n";
}

DogmaticLimit parse_weights(std::string_view spec, const std::vector<ActorOpinion>& opinions) {
  DogmaticLimit limit;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    const auto item = spec.substr(start, end - start);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InputError("ParseError", "weights must look like ACTOR=W,...");
    const std::string actor(item.substr(0, eq));
    const std::string value(item.substr(eq + 1));

    std::size_t consumed = 0;
    double w = 0.0;
    try {
      w = std::stod(value, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed == 0 || consumed != value.size() || !std::isfinite(w) || w < 0.0) {
      throw InputError("ParseError", "invalid weight '" + value + "' for actor '" + actor + "'");
    }

    std::size_t index = opinions.size();
    for (std::size_t i = 0; i < opinions.size(); ++i) {
      if (opinions[i].actor == actor) index = i;
    }
    if (index == opinions.size()) throw InputError("ParseError", "unknown actor '" + actor + "' in weights");
    limit.weights[index] = w;
    start = end + 1;
  }
  return limit;
}

TableFixture example_table() {
  const Domain domain({"x", "not_x"});
  const auto a = BaseRate::uniform(2);
  TableFixture fixture;
  fixture.inputs = {
      Opinion::multinomial(domain, {0.10, 0.30}, 0.60, a),
      Opinion::multinomial(domain, {0.40, 0.20}, 0.40, a),
      Opinion::multinomial(domain, {0.70, 0.10}, 0.20, a),
  };
  fixture.columns = {
      {"aCBF", FusionOperator::Cumulative, {0.651, 0.209, 0.140, 0.721}},
      {"eCBF", FusionOperator::EpistemicCumulative, {0.442, 0.0, 0.558, 0.721}},
      {"BCF", FusionOperator::Constraint, {0.738, 0.184, 0.078, 0.777}},
      {"ABF", FusionOperator::Averaging, {0.509, 0.164, 0.327, 0.673}},
      {"WBF", FusionOperator::Weighted, {0.562, 0.146, 0.292, 0.708}},
      {"CCF", FusionOperator::ConsensusCompromise, {0.629, 0.182, 0.189, 0.723}},
  };
  return fixture;
}

int cmd_table(const TableFixture& fixture, double tolerance, std::ostream& out) {
  const auto x = ValueSet::singleton(0);
  const auto not_x = ValueSet::singleton(1);

  struct Row {
    const char* name;
    std::vector<double> values;
  };
  std::vector<Row> rows = {{"b(x)", {}}, {"b(~x)", {}}, {"u", {}}, {"a(x)", {}}, {"P(x)", {}}};
  for (const auto& column : fixture.columns) {
    double bx = NAN, bnx = NAN, u = NAN, ax = NAN, px = NAN;
    try {
      const auto fused = fuse(column.op, fixture.inputs);
      bx = fused.belief(x);
      bnx = fused.belief(not_x);
      u = fused.uncertainty();
      ax = fused.base_rate()[0];
      px = project_probability(fused)[0];
    } catch (const Error& e) {
      out << column.name << ": " << e.what() << "\n";
    }
    rows[0].values.push_back(bx);
    rows[1].values.push_back(bnx);
    rows[2].values.push_back(u);
    rows[3].values.push_back(ax);
    rows[4].values.push_back(px);
  }

  // Expected-value slot for each row; a(x) is shown but not checked.
  const int expected_slot[] = {0, 1, 2, -1, 3};

  out << std::left << std::setw(8) << "";
  for (const auto& column : fixture.columns) out << std::setw(13) << column.name;
  out << "\n";

  int checked = 0;
  int failed = 0;
  out << std::fixed << std::setprecision(3);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << std::setw(8) << rows[r].name;
    for (std::size_t c = 0; c < fixture.columns.size(); ++c) {
      const double value = rows[r].values[c];
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(3) << value;
      if (expected_slot[r] >= 0) {
        const double expected = fixture.columns[c].expected[static_cast<std::size_t>(expected_slot[r])];
        const bool pass = std::abs(value - expected) <= tolerance;
        ++checked;
        if (!pass) ++failed;
        cell << (pass ? " PASS" : " FAIL");
      }
      out << std::setw(13) << cell.str();
    }
    out << "\n";
  }
  out << std::defaultfloat << checked - failed << "/" << checked << " cells within " << tolerance << "\n";
  return failed == 0 ? kOk : kTableMismatch;
}

int cmd_fuse(const FuseRequest& request, std::ostream& out, std::ostream& err) {
  std::optional<OpinionFile> input;
  FusionOptions opts;
  FusionOperator op;
  try {
    op = parse_operator(request.op);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  try {
    input = parse_opinion_file(read_file(request.input_path));
    if (request.weights) {
      const bool any_dogmatic = std::any_of(input->opinions.begin(), input->opinions.end(),
                                            [](const ActorOpinion& a) { return a.opinion.is_dogmatic(); });
      auto limit = parse_weights(*request.weights, input->opinions);
      if (any_dogmatic) {
        opts.dogmatic_weights = std::move(limit);
      } else {
        err << "warning: --weights ignored, no input is dogmatic\n";
      }
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  std::vector<Opinion> ops;
  for (const auto& a : input->opinions) ops.push_back(a.opinion);
  try {
    auto fused = fuse(op, ops, opts);
    OpinionFile result{input->domain, {{"fused:" + request.op, std::move(fused)}}};
    return emit(format_opinion_file(result, true), request.output_path, out, err) ? kOk : kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFusionError;
  }
}

int cmd_convert(const std::string& input_path, std::string_view direction, const std::optional<std::string>& output_path,
                std::ostream& out, std::ostream& err) {
  try {
    const auto text = read_file(input_path);
    if (direction == "to-evidence") {
      const auto file = parse_opinion_file(text);
      EvidenceFile result{file.domain, {}};
      try {
        for (const auto& [actor, op] : file.opinions) result.records.push_back({actor, opinion_to_evidence(op)});
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kFusionError;
      }
      return emit(format_evidence_file(result), output_path, out, err) ? kOk : kInputError;
    }
    if (direction == "to-opinion") {
      const auto file = parse_evidence_file(text);
      OpinionFile result{file.domain, {}};
      for (const auto& [actor, ev] : file.records) result.opinions.push_back({actor, evidence_to_opinion(ev)});
      return emit(format_opinion_file(result), output_path, out, err) ? kOk : kInputError;
    }
    err << "error: unknown direction '" << direction << "' (expected to-evidence or to-opinion)\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

int cmd_validate(const std::string& input_path, std::ostream& out, std::ostream& err) {
  std::vector<Violation> violations;
  try {
    violations = check_opinion_file(read_file(input_path));
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  for (const auto& v : violations) err << v.actor << ": " << v.detail << "\n";
  if (!violations.empty()) return kInputError;
  out << "ok\n";
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subjective-logic opinion fusion", "slfuse"};
  app.require_subcommand(1);

  FuseRequest fuse_request;
  std::string weights;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse all opinions in a file");
  fuse_cmd->add_option("--op", fuse_request.op, "Fusion operator")
      ->required()
      ->check(CLI::IsMember({"cbf", "ecbf", "abf", "wbf", "bcf", "ccf"}));
  fuse_cmd->add_option("--input", fuse_request.input_path, "Opinion file")->required();
  auto* fuse_output = fuse_cmd->add_option("--output", "Output path (default: standard output)");
  auto* weights_opt = fuse_cmd->add_option("--weights", weights, "Dogmatic weights ACTOR=W,...");

  double tolerance = 1e-3;
  auto* table_cmd = app.add_subcommand("table", "Reproduce the worked example table");
  table_cmd->add_option("--tolerance", tolerance, "Absolute tolerance per cell")->capture_default_str();

  std::string convert_input, direction;
  auto* convert_cmd = app.add_subcommand("convert", "Convert between opinions and Dirichlet evidence");
  convert_cmd->add_option("--input", convert_input, "Input file")->required();
  convert_cmd->add_option("--direction", direction, "to-evidence or to-opinion")
      ->required()
      ->check(CLI::IsMember({"to-evidence", "to-opinion"}));
  auto* convert_output = convert_cmd->add_option("--output", "Output path (default: standard output)");

  std::string validate_input;
  auto* validate_cmd = app.add_subcommand("validate", "Check every opinion in a file");
  validate_cmd->add_option("--input", validate_input, "Opinion file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInputError;
  }

  auto optional_string = [](CLI::Option* opt) -> std::optional<std::string> {
    if (opt->count() == 0) return std::nullopt;
    return opt->as<std::string>();
  };

  if (fuse_cmd->parsed()) {
    fuse_request.output_path = optional_string(fuse_output);
    if (weights_opt->count() > 0) fuse_request.weights = weights;
    return cmd_fuse(fuse_request, out, err);
  }
  if (table_cmd->parsed()) return cmd_table(example_table(), tolerance, out);
  if (convert_cmd->parsed()) return cmd_convert(convert_input, direction, optional_string(convert_output), out, err);
  return cmd_validate(validate_input, out, err);
}

}  // namespace sl::cli
