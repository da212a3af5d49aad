#include "ocm/slice_store.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "ocm/error.hpp"

namespace ocm {

namespace {

constexpr std::array<char, 4> kMagic{'O', 'C', 'M', '2'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kCompleteOffset = 8;

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("slice store: truncated header");
  return value;
}

}  // namespace

bool StoreLayout::has(SurfaceRole role) const noexcept {
  return std::find(roles.begin(), roles.end(), role) != roles.end();
}

std::size_t StoreLayout::role_index(SurfaceRole role) const {
  const auto it = std::find(roles.begin(), roles.end(), role);
  if (it == roles.end()) {
    throw DomainError(std::string("slice store has no ") + to_string(role) + " surfaces");
  }
  return static_cast<std::size_t>(it - roles.begin());
}

std::size_t SliceStore::slot(std::size_t k, SurfaceRole role, std::size_t player) const {
  if (k > layout_.steps) throw DomainError("slice store: time index out of range");
  if (player >= layout_.players) throw DomainError("slice store: player index out of range");
  return (k * layout_.roles.size() + layout_.role_index(role)) * layout_.players + player;
}

void SliceStore::check_shape(const Slice& slice) const {
  if (slice.cells() != layout_.cells || slice.prices() != layout_.prices) {
    throw DomainError("slice store: slice shape does not match the layout");
  }
}

MemorySliceStore::MemorySliceStore(StoreLayout layout)
    : SliceStore(std::move(layout)),
      slices_(this->layout().slice_count()),
      written_(this->layout().slice_count(), false) {}

void MemorySliceStore::write(std::size_t k, SurfaceRole role, std::size_t player,
                             const Slice& slice) {
  check_shape(slice);
  const std::size_t s = slot(k, role, player);
  std::lock_guard lock(mutex_);
  slices_[s] = slice;
  written_[s] = true;
}

Slice MemorySliceStore::read(std::size_t k, SurfaceRole role, std::size_t player) const {
  const std::size_t s = slot(k, role, player);
  std::lock_guard lock(mutex_);
  if (!written_[s]) throw DomainError("slice store: slice was never written");
  return slices_[s];
}

FileSliceStore::FileSliceStore(std::filesystem::path path, StoreLayout layout, std::string metadata,
                               std::uint64_t data_offset, bool writable)
    : SliceStore(std::move(layout)),
      path_(std::move(path)),
      metadata_(std::move(metadata)),
      data_offset_(data_offset),
      writable_(writable) {}

std::unique_ptr<FileSliceStore> FileSliceStore::create(const std::filesystem::path& path,
                                                       StoreLayout layout, std::string metadata) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, layout.steps);
  put<std::uint64_t>(out, layout.players);
  put<std::uint64_t>(out, layout.cells);
  put<std::uint64_t>(out, layout.prices);
  put<std::uint64_t>(out, layout.roles.size());
  for (SurfaceRole r : layout.roles) put<std::uint32_t>(out, static_cast<std::uint32_t>(r));
  put<std::uint64_t>(out, metadata.size());
  out.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));
  const auto data_offset = static_cast<std::uint64_t>(out.tellp());
  out.close();
  if (!out) throw IoError("cannot write header of " + path.string());

  const std::uint64_t bytes =
      static_cast<std::uint64_t>(layout.slice_count()) * layout.cells * layout.prices * sizeof(double);
  std::filesystem::resize_file(path, data_offset + bytes);

  std::unique_ptr<FileSliceStore> store(
      new FileSliceStore(path, std::move(layout), std::move(metadata), data_offset, true));
  store->file_.open(path, std::ios::binary | std::ios::in | std::ios::out);
  if (!store->file_) throw IoError("cannot reopen " + path.string());
  return store;
}

std::unique_ptr<FileSliceStore> FileSliceStore::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError(path.string() + " is not a surface dump");
  if (get<std::uint32_t>(in) != kVersion) throw IoError(path.string() + ": unsupported version");
  if (get<std::uint32_t>(in) != 1) throw IoError(path.string() + ": dump is incomplete");
  StoreLayout layout;
  layout.steps = get<std::uint64_t>(in);
  layout.players = get<std::uint64_t>(in);
  layout.cells = get<std::uint64_t>(in);
  layout.prices = get<std::uint64_t>(in);
  const auto roles = get<std::uint64_t>(in);
  if (roles > 16) throw IoError(path.string() + ": corrupt role table");
  for (std::uint64_t r = 0; r < roles; ++r) {
    const auto id = get<std::uint32_t>(in);
    if (id > static_cast<std::uint32_t>(SurfaceRole::GenProbability)) {
      throw IoError(path.string() + ": unknown surface role");
    }
    layout.roles.push_back(static_cast<SurfaceRole>(id));
  }
  const auto meta_len = get<std::uint64_t>(in);
  std::string metadata(meta_len, '\0');
  in.read(metadata.data(), static_cast<std::streamsize>(meta_len));
  if (!in) throw IoError(path.string() + ": truncated metadata");
  const auto data_offset = static_cast<std::uint64_t>(in.tellg());
  in.close();

  const std::uint64_t bytes =
      static_cast<std::uint64_t>(layout.slice_count()) * layout.cells * layout.prices * sizeof(double);
  if (std::filesystem::file_size(path) != data_offset + bytes) {
    throw IoError(path.string() + ": file size does not match its header");
  }
  std::unique_ptr<FileSliceStore> store(
      new FileSliceStore(path, std::move(layout), std::move(metadata), data_offset, false));
  store->file_.open(path, std::ios::binary | std::ios::in);
  if (!store->file_) throw IoError("cannot reopen " + path.string());
  return store;
}

void FileSliceStore::write(std::size_t k, SurfaceRole role, std::size_t player, const Slice& slice) {
  if (!writable_) throw IoError(path_.string() + " is read-only");
  check_shape(slice);
  const std::uint64_t bytes = slice.values().size() * sizeof(double);
  const std::uint64_t offset = data_offset_ + slot(k, role, player) * bytes;
  std::lock_guard lock(mutex_);
  file_.seekp(static_cast<std::streamoff>(offset));
  file_.write(reinterpret_cast<const char*>(slice.values().data()), static_cast<std::streamsize>(bytes));
  if (!file_) throw IoError("write failed on " + path_.string());
}

Slice FileSliceStore::read(std::size_t k, SurfaceRole role, std::size_t player) const {
  Slice slice(layout().cells, layout().prices);
  const std::uint64_t bytes = slice.values().size() * sizeof(double);
  const std::uint64_t offset = data_offset_ + slot(k, role, player) * bytes;
  std::lock_guard lock(mutex_);
  file_.seekg(static_cast<std::streamoff>(offset));
  file_.read(reinterpret_cast<char*>(slice.values().data()), static_cast<std::streamsize>(bytes));
  if (!file_) throw IoError("read failed on " + path_.string());
  return slice;
}

void FileSliceStore::finalize() {
  if (!writable_) return;
  std::lock_guard lock(mutex_);
  file_.seekp(static_cast<std::streamoff>(kCompleteOffset));
  put<std::uint32_t>(file_, 1);
  file_.flush();
  if (!file_) throw IoError("cannot finalize " + path_.string());
}

}  // namespace ocm
