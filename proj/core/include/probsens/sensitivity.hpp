#pragma once

#include "probsens/dependency.hpp"
#include "probsens/errors.hpp"
#include "probsens/exp_polynomial.hpp"
#include "probsens/moments.hpp"
#include "probsens/recurrence.hpp"

#include <cstddef>
#include <string>

namespace probsens {

class ClassificationError : public Error {
public:
    ClassificationError(const std::string& message, Classification record)
        : Error(ErrorKind::Classification, message), record_(std::move(record)) {}

    const Classification& record() const noexcept { return record_; }

private:
    Classification record_;
};

constexpr std::size_t kDefaultEquationCap = 500;

/// Equation cap from PROBSENS_EQ_CAP, falling back to the default.
std::size_t equation_cap();

struct EngineOptions {
    std::size_t cap = equation_cap();
    /// Keeps terms that vanish by parameter independence (for cross checks).
    bool keep_vanishing_terms = false;
};

/// Derivative of the moment recurrence of `m` w.r.t. `p`, with terms whose
/// coefficient derivative is zero or whose monomial is p-independent dropped.
Recurrence sensitivity_recurrence(const MomentEngine& engine, const DependencyGraph& graph, const Monomial& m,
                                  const std::string& p, bool drop_vanishing = true);

/// Closed system for d/dp E(M_n) built by the two-worklist procedure.
RecurrenceSystem algorithm1(const MomentEngine& engine, const DependencyGraph& graph, const Monomial& m,
                            const std::string& p, const EngineOptions& options = {});

/// Closed system of moment recurrences for E(M_n); throws CapExceededError
/// when the closure does not stay below the cap.
RecurrenceSystem moment_system(const MomentEngine& engine, const Monomial& m, std::size_t cap = equation_cap());

/// Error for programs outside the admissible class, naming the witnesses.
[[noreturn]] void throw_not_admissible(const DependencyGraph& graph);

/// d/dp E(M_n) by differentiating the moment closed form; requires an
/// admissible program. `system_out` receives the solved moment system.
ExpPolynomial sensitivity_via_closed_form(const MomentEngine& engine, const DependencyGraph& graph, const Monomial& m,
                                          const std::string& p, RecurrenceSystem* system_out = nullptr);

}  // namespace probsens
