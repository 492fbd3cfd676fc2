#pragma once

#include <memory>
#include <string>

#include "xrid/models/classifier.hpp"

namespace xrid {

/// Self-describing versioned JSON container: family tag, config, scaler,
/// named parameter tensors (or trees), snapshot metadata. Round-trip
/// lossless.
void save_model(const std::string& path, const Classifier& model);
std::unique_ptr<Classifier> load_model(const std::string& path);

}  // namespace xrid
