#include "plmm/transform.hpp"
#include "plmm/errors.hpp"

#include <cmath>

namespace plmm {

double MonotoneMap::apply(double x) const {
    switch (kind) {
    case Kind::Identity:
        return x;
    case Kind::Power:
        // odd extension keeps the map strictly increasing for negative inputs
        return x < 0 ? -std::pow(-x, a) : std::pow(x, a);
    case Kind::Affine:
        return a * x + b;
    case Kind::Log1pScale:
        return std::log1p(a * x) / a;
    }
    return x;
}

void MonotoneMap::validate() const {
    switch (kind) {
    case Kind::Identity:
        return;
    case Kind::Power:
        if (!(a > 0.0))
            raise(ErrorCode::SpecValidation, "NonPositiveExponent: power map requires gamma > 0");
        return;
    case Kind::Affine:
        if (!(a > 0.0))
            raise(ErrorCode::SpecValidation, "NonPositiveScale: affine map requires scale > 0");
        return;
    case Kind::Log1pScale:
        if (!(a > 0.0))
            raise(ErrorCode::SpecValidation, "NonPositiveScale: log1p_scale map requires k > 0");
        return;
    }
}

void MonotoneMap::validate_on_range(double lo, double hi) const {
    validate();
    if (kind == Kind::Log1pScale) {
        // need 1 + k*x > 0 over the whole objective range
        if (!(1.0 + a * lo > 0.0) || !(1.0 + a * hi > 0.0))
            raise(ErrorCode::SpecValidation,
                  "MapDomainViolation: log1p_scale undefined on the objective range");
    }
}

std::array<double, 2> TransformChain::rotate(std::array<double, 2> psi) const {
    const double a = psi[0], b = psi[1];
    // Multiples of 45 degrees are evaluated as exact sums/differences scaled
    // by one shared constant. Plateau and trade-off ties between field values
    // are exact in unrotated coordinates; computing cos/sin separately breaks
    // those ties by an ulp and manufactures spurious locally optimal vertices.
    double q = std::fmod(rotation_degrees, 360.0);
    if (q < 0) q += 360.0;
    if (std::fmod(q, 45.0) == 0.0) {
        constexpr double k = 0.70710678118654752440; // closest double to 1/sqrt(2)
        switch (static_cast<int>(q / 45.0)) {
        case 0: return {a, b};
        case 1: return {(a - b) * k, (a + b) * k};
        case 2: return {-b, a};
        case 3: return {(-a - b) * k, (a - b) * k};
        case 4: return {-a, -b};
        case 5: return {(b - a) * k, (-a - b) * k};
        case 6: return {b, -a};
        case 7: return {(a + b) * k, (b - a) * k};
        }
    }
    const double t = rotation_degrees * (std::acos(-1.0) / 180.0);
    const double c = std::cos(t), s = std::sin(t);
    return {c * a - s * b, s * a + c * b};
}

std::array<double, 2> TransformChain::apply(std::array<double, 2> psi) const {
    auto r = rotate(psi);
    return {maps[0].apply(r[0]), maps[1].apply(r[1])};
}

PLFieldPair rotate_objectives(const PLFieldPair& field, double degrees) {
    TransformChain chain;
    chain.rotation_degrees = degrees;
    PLFieldPair out;
    out.mesh = field.mesh;
    out.values.reserve(field.values.size());
    for (const auto& v : field.values)
        out.values.push_back(chain.rotate(v));
    return out;
}

PLFieldPair apply_monotone(const PLFieldPair& field, const std::array<MonotoneMap, 2>& maps) {
    PLFieldPair out;
    out.mesh = field.mesh;
    out.values.reserve(field.values.size());
    for (const auto& v : field.values)
        out.values.push_back({maps[0].apply(v[0]), maps[1].apply(v[1])});
    return out;
}

} // namespace plmm
