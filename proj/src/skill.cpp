#include "sdlab/skill.hpp"

#include <cmath>
#include <numbers>

namespace sdlab {

SkillVector encode_category(const SkillSpec& spec, int category) {
    spec.validate();
    require(spec.kind == SkillKind::discrete, "encode_category: spec is not discrete");
    require(category >= 0 && category < spec.discrete_count,
            "encode_category: category out of range");
    SkillVector sv;
    sv.category = category;
    sv.z.assign(spec.discrete_count, 0.0);
    sv.z[category] = 1.0;
    if (spec.encoding == SkillEncoding::zero_centered_one_hot) {
        const double mean = 1.0 / static_cast<double>(spec.discrete_count);
        for (double& v : sv.z) v -= mean;
    }
    return sv;
}

SkillVector sample_skill(const SkillSpec& spec, Rng& rng) {
    spec.validate();
    if (spec.kind == SkillKind::continuous) {
        SkillVector sv;
        sv.z.resize(spec.dim);
        for (double& v : sv.z) v = rng.normal();
        return sv;
    }
    return encode_category(spec, rng.uniform_int(spec.discrete_count));
}

int category_of(const SkillSpec& spec, const SkillVector& z) {
    require(spec.kind == SkillKind::discrete, "category_of: spec is not discrete");
    require(static_cast<int>(z.z.size()) == spec.discrete_count,
            "category_of: vector length mismatch");
    int best = 0;
    for (int i = 1; i < spec.discrete_count; ++i)
        if (z.z[i] > z.z[best]) best = i;
    return best;
}

double log_prior(const SkillSpec& spec, const SkillVector& z) {
    spec.validate();
    if (spec.kind == SkillKind::discrete) {
        require(static_cast<int>(z.z.size()) == spec.discrete_count,
                "log_prior: vector length mismatch");
        const int cat = category_of(spec, z);
        const SkillVector expect = encode_category(spec, cat);
        for (int i = 0; i < spec.discrete_count; ++i)
            require(std::abs(z.z[i] - expect.z[i]) <= 1e-12, "log_prior: malformed discrete skill");
        return -std::log(static_cast<double>(spec.discrete_count));
    }
    require(static_cast<int>(z.z.size()) == spec.dim, "log_prior: vector length mismatch");
    double lp = 0.0;
    for (double v : z.z) lp += -0.5 * v * v - 0.5 * std::log(2.0 * std::numbers::pi);
    return lp;
}

}  // namespace sdlab
