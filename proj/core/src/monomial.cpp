#include "probsens/monomial.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace probsens {

Monomial::Monomial(std::vector<Factor> factors) {
    std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) { return a.first < b.first; });
    for (auto& [name, exp] : factors) {
        if (exp == 0)
            continue;
        if (!factors_.empty() && factors_.back().first == name)
            factors_.back().second += exp;
        else
            factors_.emplace_back(std::move(name), exp);
        degree_ += exp;
    }
}

Monomial Monomial::symbol(std::string name, unsigned exponent) {
    return Monomial({{std::move(name), exponent}});
}

unsigned Monomial::degree(std::string_view name) const {
    for (const auto& [n, e] : factors_)
        if (n == name)
            return e;
    return 0;
}

std::set<std::string> Monomial::symbols() const {
    std::set<std::string> out;
    for (const auto& f : factors_)
        out.insert(f.first);
    return out;
}

Monomial Monomial::operator*(const Monomial& other) const {
    Monomial out;
    out.factors_.reserve(factors_.size() + other.factors_.size());
    auto a = factors_.begin();
    auto b = other.factors_.begin();
    while (a != factors_.end() || b != other.factors_.end()) {
        if (b == other.factors_.end() || (a != factors_.end() && a->first < b->first)) {
            out.factors_.push_back(*a++);
        } else if (a == factors_.end() || b->first < a->first) {
            out.factors_.push_back(*b++);
        } else {
            out.factors_.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    out.degree_ = degree_ + other.degree_;
    return out;
}

std::optional<Monomial> Monomial::divide(const Monomial& divisor) const {
    Monomial out;
    auto b = divisor.factors_.begin();
    for (const auto& [name, exp] : factors_) {
        if (b != divisor.factors_.end() && b->first < name)
            return std::nullopt;
        if (b != divisor.factors_.end() && b->first == name) {
            if (b->second > exp)
                return std::nullopt;
            if (b->second < exp)
                out.factors_.emplace_back(name, exp - b->second);
            ++b;
        } else {
            out.factors_.emplace_back(name, exp);
        }
    }
    if (b != divisor.factors_.end())
        return std::nullopt;
    out.degree_ = degree_ - divisor.degree_;
    return out;
}

Monomial Monomial::without(std::string_view name) const {
    Monomial out;
    for (const auto& f : factors_) {
        if (f.first == name)
            continue;
        out.factors_.push_back(f);
        out.degree_ += f.second;
    }
    return out;
}

Monomial Monomial::with_exponent(const std::string& name, unsigned exponent) const {
    std::vector<Factor> fs;
    for (const auto& f : factors_)
        if (f.first != name)
            fs.push_back(f);
    fs.emplace_back(name, exponent);
    return Monomial(std::move(fs));
}

std::string Monomial::to_string() const {
    if (factors_.empty())
        return "1";
    std::string out;
    for (const auto& [name, exp] : factors_) {
        if (!out.empty())
            out += '*';
        out += name;
        if (exp > 1)
            out += '^' + std::to_string(exp);
    }
    return out;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    if (a.degree_ != b.degree_)
        return a.degree_ <=> b.degree_;
    auto ia = a.factors_.begin();
    auto ib = b.factors_.begin();
    while (ia != a.factors_.end() && ib != b.factors_.end()) {
        if (ia->first != ib->first)
            // The side holding the smaller symbol has a positive exponent where the other has zero.
            return ia->first < ib->first ? std::strong_ordering::greater : std::strong_ordering::less;
        if (ia->second != ib->second)
            return ia->second <=> ib->second;
        ++ia;
        ++ib;
    }
    if (ia != a.factors_.end())
        return std::strong_ordering::greater;
    if (ib != b.factors_.end())
        return std::strong_ordering::less;
    return std::strong_ordering::equal;
}

Monomial parse_monomial(std::string_view text) {
    std::vector<Monomial::Factor> factors;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
    };
    skip_ws();
    if (i < text.size() && text.substr(i) == "1")
        return Monomial();
    while (i < text.size()) {
        skip_ws();
        std::size_t start = i;
        while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
            ++i;
        if (start == i || std::isdigit(static_cast<unsigned char>(text[start])))
            throw std::invalid_argument("malformed monomial: " + std::string(text));
        std::string name(text.substr(start, i - start));
        unsigned exp = 1;
        skip_ws();
        if (i < text.size() && (text[i] == '^' || text.substr(i, 2) == "**")) {
            i += text[i] == '^' ? 1 : 2;
            skip_ws();
            std::size_t ds = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                ++i;
            if (ds == i)
                throw std::invalid_argument("malformed exponent in monomial: " + std::string(text));
            exp = static_cast<unsigned>(std::stoul(std::string(text.substr(ds, i - ds))));
        }
        factors.emplace_back(std::move(name), exp);
        skip_ws();
        if (i < text.size()) {
            if (text[i] != '*')
                throw std::invalid_argument("malformed monomial: " + std::string(text));
            ++i;
        }
    }
    if (factors.empty())
        throw std::invalid_argument("empty monomial");
    return Monomial(std::move(factors));
}

}  // namespace probsens
