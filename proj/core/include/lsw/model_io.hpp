#pragma once

#include <set>
#include <string>

#include "lsw/config.hpp"
#include "lsw/tvmodel.hpp"

namespace lsw {

struct ModelWithParams {
    ModelSpec model;
    ParamVector theta;
};

/// Reads the curve blocks `d.*`, `sigma.*`, `ar.*`, `ma.*`.
///
/// Per curve: `basis` (polynomial | harmonic, default polynomial), `degree` (default 0)
/// or `powers` for polynomial bases, `freqs` for harmonic bases, `link`
/// (identity | log, default identity), `coeffs` (required), `fixed`
/// (default false). The AR or MA part is present iff its `coeffs` key is.
/// Throws ConfigError.
ModelWithParams parse_model(const KeyValueConfig& cfg);

/// Inverse of parse_model: writes every curve key into `cfg`.
void write_model(const ModelSpec& model, const ParamVector& theta, KeyValueConfig& cfg);

/// Every key parse_model understands.
std::set<std::string> model_keys();

} // namespace lsw
