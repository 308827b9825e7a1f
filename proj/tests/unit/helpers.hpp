#pragma once

#include "probsens/normalizer.hpp"
#include "probsens/param_expr.hpp"
#include "probsens/parser.hpp"

#include <string>

namespace testing {

inline std::string corpus(const std::string& name) {
    return std::string(PROBSENS_CORPUS_DIR) + "/" + name;
}

inline probsens::ParamExpr P(const char* name) {
    return probsens::ParamExpr::parameter(name);
}

inline probsens::Rational Q(long num, long den = 1) {
    probsens::Rational q(num, den);
    q.canonicalize();
    return q;
}

inline probsens::ParamExpr C(long num, long den = 1) {
    return probsens::ParamExpr(Q(num, den));
}

inline probsens::NormalizedProgram load(const std::string& name) {
    return probsens::normalize(probsens::parse_file(corpus(name)));
}

inline probsens::NormalizedProgram load_source(const std::string& source) {
    return probsens::normalize(probsens::parse(source));
}

}  // namespace testing
