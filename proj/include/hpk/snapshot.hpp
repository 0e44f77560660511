#pragma once

#include <memory>
#include <string>

#include "hpk/kernel.hpp"

namespace hpk {

inline constexpr const char* kSnapshotMagic = "HPKSTORE1";
inline constexpr int kSnapshotVersion = 1;

// Serialises everything reachable from the root environment, the shared
// table, the display cache and retained results. One JSON record per
// line, sorted by object id. Assigns ids to objects seen for the first
// time, so call it only between evaluations.
std::string snapshotText(Store& store);

// Writes snapshotText to `path` through a temporary file and a rename, so
// a failure leaves any previous snapshot intact. Throws StoreError.
void stabilize(Store& store, const std::string& path);

// Rebuilds a store from snapshot text. Throws StoreError ("corrupt
// snapshot", "unsupported snapshot version") without a partial result.
std::unique_ptr<Store> loadSnapshotText(const std::string& text);
std::unique_ptr<Store> loadStore(const std::string& path);

}  // namespace hpk
