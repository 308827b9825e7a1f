#pragma once

#include "probsens/monomial.hpp"
#include "probsens/normalizer.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace probsens {

struct OracleEstimate {
    enum class Mode { Exact, Sampled };

    Mode mode = Mode::Exact;
    std::optional<Rational> exact;  // set in exact mode
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t trials = 0;

    std::string to_json() const;
};

const char* to_string(OracleEstimate::Mode mode);

/// Counter-based generator: the stream of a trial is a pure function of
/// (seed, trial), so results do not depend on scheduling.
class SplitMix64 {
public:
    SplitMix64(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

private:
    std::uint64_t state_;
};

constexpr std::size_t kDefaultBranchBudget = 1000000;

/// Exact distribution over program states after n iterations.
struct StateDistribution {
    std::vector<std::string> variables;
    std::map<std::vector<Rational>, Rational> states;

    Rational total_mass() const;
    Rational expectation(const Monomial& m) const;
};

/// Throws Error(Oracle) when a continuous distribution is present or the
/// number of explored branches exceeds `budget`.
StateDistribution enumerate_states(const NormalizedProgram& np, unsigned n, const ParamAssignment& sigma,
                                   std::size_t budget = kDefaultBranchBudget);

OracleEstimate enumerate_moment(const NormalizedProgram& np, const Monomial& m, unsigned n,
                                const ParamAssignment& sigma, std::size_t budget = kDefaultBranchBudget);

/// Monte Carlo estimate; trials run on `threads` workers (0 = hardware).
OracleEstimate sample_moment(const NormalizedProgram& np, const Monomial& m, unsigned n,
                             const ParamAssignment& sigma, std::size_t trials, std::uint64_t seed,
                             unsigned threads = 0);

struct FdOptions {
    OracleEstimate::Mode mode = OracleEstimate::Mode::Exact;
    std::optional<Rational> epsilon;  // 1e-4 exact, 1e-2 sampled
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    std::size_t budget = kDefaultBranchBudget;
    unsigned threads = 0;
};

/// Central difference of E(M_n) in parameter p; sampled mode shares the
/// random stream between both sides.
OracleEstimate fd_sensitivity(const NormalizedProgram& np, const Monomial& m, unsigned n,
                              const ParamAssignment& sigma, const std::string& p, const FdOptions& options = {});

}  // namespace probsens
