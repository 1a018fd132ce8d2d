#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fedsov/fl_sim.hpp"
#include "fedsov/protocol.hpp"

namespace fedsov::io {

namespace fs = std::filesystem;

// watermark.json: {n, bits_hex}, bits packed little-endian within a byte.
void save_watermark(const fs::path& path, const Watermark& wm);
Watermark load_watermark(const fs::path& path);

// embedding.json: {omega, n, seed}; entries are regenerated on load.
void save_embedding(const fs::path& path, const EmbeddingMatrix& e);
EmbeddingMatrix load_embedding(const fs::path& path);

// model.bin: little-endian f64 parameter vector; model.json: shape sidecar.
void save_model(const fs::path& dir, const ToyModel& model, int dim, int classes);
ToyModel load_model(const fs::path& dir);

// keys/client_<i>.json: {curve_id, sk: [x_hex, y_hex], pk: hex, created_at}.
void save_keypair(const fs::path& path, const SignatureScheme& scheme,
                  const KeyPair& kp);
KeyPair load_keypair(const fs::path& path, const SignatureScheme& scheme);

// pkcon.bin: raw concatenation; pkcon.json: {count, pk_len_bytes}.
void save_pk_con(const fs::path& dir, const ConcatenatedKey& pk_con,
                 size_t pk_len_bytes);
Bytes load_pk_con(const fs::path& dir);

void save_public_params(const fs::path& path, const SystemPublicParams& pp);
SystemPublicParams load_public_params(const fs::path& path);

void save_config(const fs::path& path, const FLConfig& cfg);
FLConfig load_config(const fs::path& path);

void save_metrics_csv(const fs::path& path, const std::vector<RoundMetrics>& rounds);

// Full run directory: config.json, metrics.csv, model.bin/json, keys/,
// watermark.json, embedding.json, pkcon.bin/json, public_params.json.
void save_run(const fs::path& dir, const FederationResult& result);

struct LoadedRun {
    FLConfig cfg;
    ToyModel model;
    Watermark wm;
    EmbeddingMatrix embed;
    Bytes pk_con;
    SystemPublicParams pp;
};

LoadedRun load_run(const fs::path& dir);

}  // namespace fedsov::io
