#pragma once

#include "ferrospin/model.hpp"

#include <string>

namespace ferrospin {

// {"n": int, "lambda": [...], "edges": [{"u","v","beta","gamma"}]}; every edge
// must have beta * gamma > 1.
TwoSpinSystem parse_instance(const std::string& text);
TwoSpinSystem load_instance(const std::string& path);
std::string instance_to_json(const TwoSpinSystem& system);

// {"n0": int, "n1": int, "W": [[...]], "theta": [...]}. W is either the full
// (n0+n1) square matrix or the n0 x n1 cross block.
RbmParams parse_rbm(const std::string& text);
RbmParams load_rbm(const std::string& path);

// FNV-1a over the canonical instance JSON, as 16 hex digits.
std::string instance_hash(const TwoSpinSystem& system);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

} // namespace ferrospin
