#include "toposcalc/caps.hpp"

#include <cstdlib>
#include <string>

#include "toposcalc/error.hpp"

namespace toposcalc {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingComposite: return "MissingComposite";
    case ErrorCode::AssociativityViolation: return "AssociativityViolation";
    case ErrorCode::IdentityViolation: return "IdentityViolation";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::UnknownArrow: return "UnknownArrow";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::NotAMono: return "NotAMono";
    case ErrorCode::NotLocal: return "NotLocal";
    case ErrorCode::MissingMaximal: return "MissingMaximal";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::TransitivityViolation: return "TransitivityViolation";
    case ErrorCode::NotAClosureOperator: return "NotAClosureOperator";
    case ErrorCode::IsoForcingIncomplete: return "IsoForcingIncomplete";
    case ErrorCode::EnumerationUnavailable: return "EnumerationUnavailable";
    case ErrorCode::ResidualNotTrivial: return "ResidualNotTrivial";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SemanticError: return "SemanticError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

Caps parse_caps(const char* text) {
  Caps c;
  if (text == nullptr || *text == 0) return c;
  std::string s(text);
  if (s.find('=') == std::string::npos) {
    c.max_arrows = std::strtoull(s.c_str(), nullptr, 10);
    if (c.max_arrows == 0) c.max_arrows = Caps{}.max_arrows;
    return c;
  }
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string entry = s.substr(pos, comma - pos);
    std::size_t eq = entry.find('=');
    if (eq != std::string::npos) {
      std::string key = entry.substr(0, eq);
      std::size_t value = std::strtoull(entry.c_str() + eq + 1, nullptr, 10);
      if (value > 0) {
        if (key == "arrows") c.max_arrows = value;
        else if (key == "elements") c.max_elements_per_object = value;
        else if (key == "enum") c.max_enumeration = value;
      }
    }
    pos = comma + 1;
  }
  return c;
}

const Caps& caps() {
  static const Caps instance = parse_caps(std::getenv("TOPOSCALC_SIZE_CAP"));
  return instance;
}

void require_within_cap(std::size_t count, std::size_t cap, const char* what) {
  if (count > cap) {
    throw Error(ErrorCode::SizeCapExceeded,
                std::string(what) + " needs " + std::to_string(count) +
                    " entries, cap is " + std::to_string(cap));
  }
}

}  // namespace toposcalc
