#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ocm/grid.hpp"

namespace ocm {

// Shape of a surface history: (steps + 1) time slices, each holding one Slice per
// (role, player).
struct StoreLayout {
  std::size_t steps = 0;
  std::size_t players = 1;
  std::size_t cells = 0;
  std::size_t prices = 0;
  std::vector<SurfaceRole> roles;

  bool has(SurfaceRole role) const noexcept;
  std::size_t role_index(SurfaceRole role) const;  // throws DomainError if absent
  std::size_t slice_count() const noexcept { return (steps + 1) * roles.size() * players; }
  friend bool operator==(const StoreLayout&, const StoreLayout&) = default;
};

// Random-access storage of per-slice surfaces. Writers and readers may run on different
// threads; individual calls are serialized.
class SliceStore {
 public:
  explicit SliceStore(StoreLayout layout) : layout_(std::move(layout)) {}
  virtual ~SliceStore() = default;

  const StoreLayout& layout() const noexcept { return layout_; }

  virtual void write(std::size_t k, SurfaceRole role, std::size_t player, const Slice& slice) = 0;
  virtual Slice read(std::size_t k, SurfaceRole role, std::size_t player) const = 0;

 protected:
  std::size_t slot(std::size_t k, SurfaceRole role, std::size_t player) const;
  void check_shape(const Slice& slice) const;

 private:
  StoreLayout layout_;
};

class MemorySliceStore final : public SliceStore {
 public:
  explicit MemorySliceStore(StoreLayout layout);

  void write(std::size_t k, SurfaceRole role, std::size_t player, const Slice& slice) override;
  Slice read(std::size_t k, SurfaceRole role, std::size_t player) const override;

 private:
  std::vector<Slice> slices_;
  std::vector<bool> written_;
  mutable std::mutex mutex_;
};

// Binary file:
//   "OCM2" | u32 version | u32 complete | u64 steps, players, cells, prices, role count |
//   u32 role ids | u64 metadata length | metadata bytes | slices (native doubles)
// Slices are ordered by time, then role, then player.
class FileSliceStore final : public SliceStore {
 public:
  // Creates (truncates) `path` and preallocates every slice.
  static std::unique_ptr<FileSliceStore> create(const std::filesystem::path& path,
                                                StoreLayout layout, std::string metadata = {});
  // Opens a finalized store read-only; throws IoError on a bad or incomplete file.
  static std::unique_ptr<FileSliceStore> open(const std::filesystem::path& path);

  void write(std::size_t k, SurfaceRole role, std::size_t player, const Slice& slice) override;
  Slice read(std::size_t k, SurfaceRole role, std::size_t player) const override;

  // Marks the file complete; later open() calls accept it.
  void finalize();

  const std::string& metadata() const noexcept { return metadata_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  FileSliceStore(std::filesystem::path path, StoreLayout layout, std::string metadata,
                 std::uint64_t data_offset, bool writable);

  std::filesystem::path path_;
  std::string metadata_;
  std::uint64_t data_offset_;
  bool writable_;
  mutable std::fstream file_;
  mutable std::mutex mutex_;
};

}  // namespace ocm
