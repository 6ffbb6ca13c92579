#pragma once

#include <vector>

#include "sdlab/contract.hpp"
#include "sdlab/rng.hpp"

namespace sdlab {

enum class SkillKind { continuous, discrete };
enum class SkillEncoding { one_hot, zero_centered_one_hot };

struct SkillSpec {
    SkillKind kind = SkillKind::continuous;
    int dim = 2;             // continuous dimensionality
    int discrete_count = 4;  // discrete only
    SkillEncoding encoding = SkillEncoding::one_hot;

    // length of the latent vector fed to networks
    int vec_dim() const { return kind == SkillKind::continuous ? dim : discrete_count; }

    void validate() const {
        if (kind == SkillKind::continuous)
            require(dim >= 1, "skill spec: continuous dim must be >= 1");
        else
            require(discrete_count >= 2, "skill spec: discrete count must be >= 2");
    }
};

struct SkillVector {
    std::vector<double> z;
    int category = -1;  // discrete only
};

// Skill vectors used by a downstream controller are clamped to this range.
inline constexpr double kSkillRange = 1.5;

SkillVector sample_skill(const SkillSpec& spec, Rng& rng);
SkillVector encode_category(const SkillSpec& spec, int category);
int category_of(const SkillSpec& spec, const SkillVector& z);
double log_prior(const SkillSpec& spec, const SkillVector& z);

inline std::vector<double> clamp_skill(std::vector<double> z) {
    for (double& v : z) {
        if (v < -kSkillRange) v = -kSkillRange;
        if (v > kSkillRange) v = kSkillRange;
    }
    return z;
}

}  // namespace sdlab
