#pragma once

#include <string>

#include <bgev/twostep.hpp>

namespace bgev::cli {

/// Lossless JSON form of a two-step fit; doubles round-trip exactly.
std::string serialise_two_step(const TwoStepFit& fit);
TwoStepFit deserialise_two_step(const std::string& json_text, const std::string& source);

}  // namespace bgev::cli
