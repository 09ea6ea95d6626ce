#pragma once

#include <string>

#include "knodest/knode/training.hpp"

namespace knodest::knode {

/// Everything needed to reconstruct and audit a trained residual model. The
/// prior field itself is not serialized; prior_id names it so loaders can
/// rebuild the matching scenario prior.
struct ModelArtifact {
    std::string prior_id;
    MlpParams params;
    TrainConfig train_config;
    std::string dataset_fingerprint;
    double best_loss = 0.0;
};

/// Versioned, self-describing text format; parameters carry 17 significant
/// digits so reload is bit-exact.
void save_model(const ModelArtifact& artifact, const std::string& path);
ModelArtifact load_model(const std::string& path);

}  // namespace knodest::knode
