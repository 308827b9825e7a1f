#pragma once

#include "probsens/dependency.hpp"
#include "probsens/exp_polynomial.hpp"
#include "probsens/normalizer.hpp"
#include "probsens/recurrence.hpp"
#include "probsens/sensitivity.hpp"

#include <optional>
#include <string>
#include <vector>

namespace probsens {

enum class Method { Auto, Diff, SensRec };

const char* to_string(Method m);
Method parse_method(const std::string& text);

constexpr int kReportSchemaVersion = 1;

struct AnalysisOptions {
    std::string target;
    std::optional<std::string> wrt;  // none: moment closed form
    Method method = Method::Auto;
    ParamAssignment eval;            // may be partial
    std::vector<long> at_n;
    std::size_t cap = equation_cap();
    bool solve = true;               // false: build the system only
    bool dump_normalized = false;
    bool dump_recurrences = false;
    std::optional<std::string> explain;
};

struct Evaluation {
    long n = 0;
    std::optional<Rational> exact;
    double approx = 0.0;
    std::optional<ParamExpr> symbolic;  // when some parameter is left free
};

struct AnalysisReport {
    std::string program_id;
    std::string target;
    std::optional<std::string> parameter;
    std::string method;  // "diff", "sensrec" or "moment"
    std::optional<Classification> classification;
    bool admissible = false;
    bool trivially_zero = false;
    std::size_t rec_count = 0;
    RecurrenceSystem system;
    std::optional<ExpPolynomial> closed_form;
    std::vector<Evaluation> evaluations;
    double seconds = 0.0;

    std::optional<std::string> normalized;
    std::optional<std::string> explanation;
    bool include_recurrences = false;

    /// "d/dp E(u_n)" or "E(u_n)".
    std::string quantity() const;
    std::string to_text() const;
    std::string to_json() const;
};

/// Substitutes the assigned parameters into a closed form.
ExpPolynomial substitute(const ExpPolynomial& f, const ParamAssignment& sigma);

/// Parses "k=v,k2=v2" with rational or decimal values.
ParamAssignment parse_assignment(const std::string& text);
/// Rational literal; a malformed one is a validation error.
Rational parse_number(const std::string& text);

/// Full pipeline on a parsed program. Throws the typed errors of the
/// pipeline stages (parse, classification, unsupported factor, cap,
/// singular evaluation).
AnalysisReport analyze(const Program& prog, const AnalysisOptions& options, const std::string& program_id = "");
AnalysisReport analyze_file(const std::string& path, const AnalysisOptions& options);

/// Classification of every parameter (or only `wrt`).
std::string classify_text(const Program& prog, const std::optional<std::string>& wrt);
std::string classify_json(const Program& prog, const std::optional<std::string>& wrt);

/// Exit code of the command line front end for an error category.
int exit_code(ErrorKind kind);

}  // namespace probsens
