#pragma once

#include <filesystem>
#include <variant>

#include "claimforge/policy/classifier.h"
#include "claimforge/policy/decision_transformer.h"

namespace claimforge::policy {

// Binary layout: magic "CFCK", u32 version, u32 model kind (0 = decision
// transformer, 1 = classifier), JSON config header (u32 length + bytes),
// u64 tensor count, then per tensor: name (u32 length + bytes), u64 rows,
// u64 cols, row-major f64 data.
inline constexpr std::uint32_t kCheckpointVersion = 1;

using LoadedModel = std::variant<DecisionTransformer, ActionClassifier>;

void save_checkpoint(const std::filesystem::path& path, const DecisionTransformer& model);
void save_checkpoint(const std::filesystem::path& path, const ActionClassifier& model);

// Throws Error(kFormatError) on bad magic/version or tensor mismatch.
LoadedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace claimforge::policy
