#ifndef ROBUSTSSM_TERM_HPP
#define ROBUSTSSM_TERM_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace rssm {

enum class TermType : uint8_t { Transition, Observation, Initial };

inline const char* to_string(TermType t) {
  switch (t) {
    case TermType::Transition: return "f";
    case TermType::Observation: return "g";
    case TermType::Initial: return "h";
  }
  return "?";
}

// One log-likelihood contribution of a state space model. xvars hold
// active-flat state indices (already offset by the model's first active
// row); ycells are flat t*r + col indices into the observation matrix.
struct Term {
  int32_t t = 0;      // state row the term is anchored at
  TermType type = TermType::Transition;
  int16_t group = 0;
  int16_t kind = 0;   // model-local dispatch tag
  int16_t a = 0;      // model-local coordinate tag (age class etc.)
  std::vector<int32_t> xvars;
  std::vector<int32_t> ycells;
};

}  // namespace rssm

#endif
