#pragma once

// Opinion/evidence file formats and the slfuse command implementations.

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sl/core.hpp"
#include "sl/dirichlet.hpp"
#include "sl/fusion.hpp"

namespace sl::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kFusionError = 2,
  kTableMismatch = 3,
};

/// Malformed or invalid input document. `name()` is the diagnostic tag
/// (ParseError, EmptyInput, DuplicateActor or a core error name).
class InputError : public std::runtime_error {
 public:
  InputError(std::string name, const std::string& detail);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

struct ActorOpinion {
  std::string actor;
  Opinion opinion;
};

struct OpinionFile {
  Domain domain;
  std::vector<ActorOpinion> opinions;
};

struct ActorEvidence {
  std::string actor;
  EvidenceRecord evidence;
};

struct EvidenceFile {
  Domain domain;
  std::vector<ActorEvidence> records;
};

/// One actor's validation failure.
struct Violation {
  std::string actor;
  std::string name;
  std::string detail;
};

/// Parses an opinion document. Structural problems and the first invalid
/// opinion throw InputError.
OpinionFile parse_opinion_file(std::string_view text);

/// Parses the document and collects every per-actor violation instead of
/// stopping at the first one. Structural problems still throw InputError.
std::vector<Violation> check_opinion_file(std::string_view text);

EvidenceFile parse_evidence_file(std::string_view text);

/// Serializes with full double precision. When `with_projection` is set each
/// record carries a "projected" map label -> P(x).
std::string format_opinion_file(const OpinionFile& file, bool with_projection = false);
std::string format_evidence_file(const EvidenceFile& file);

/// Parses "A1=0.2,A2=0.8" into weights keyed by the actors' positions.
DogmaticLimit parse_weights(std::string_view spec, const std::vector<ActorOpinion>& opinions);

struct TableColumn {
  std::string name;
  FusionOperator op;
  /// Expected b(x), b(not x), u, P(x).
  std::array<double, 4> expected;
};

struct TableFixture {
  std::vector<Opinion> inputs;
  std::vector<TableColumn> columns;
};

/// The three binomial inputs and six reference columns of the worked example.
TableFixture example_table();

struct FuseRequest {
  std::string input_path;
  std::string op;
  std::optional<std::string> output_path;
  std::optional<std::string> weights;
};

int cmd_fuse(const FuseRequest& request, std::ostream& out, std::ostream& err);
int cmd_table(const TableFixture& fixture, double tolerance, std::ostream& out);
int cmd_convert(const std::string& input_path, std::string_view direction, const std::optional<std::string>& output_path,
                std::ostream& out, std::ostream& err);
int cmd_validate(const std::string& input_path, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argument parsing included).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sl::cli
