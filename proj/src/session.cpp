#include "isr/session.hpp"

namespace isr {

std::string_view to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::Control: return "CONTROL";
    case ClassLabel::Regulated: return "REGULATED";
    case ClassLabel::Delayed: return "DELAYED";
  }
  return "CONTROL";
}

std::optional<ClassLabel> parse_label(std::string_view text) {
  for (auto label : kAllLabels) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

ClassLabel plurality(const std::array<std::size_t, kClassCount>& votes) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kClassCount; ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return kAllLabels[best];
}

}  // namespace isr
