#include "stw/cache.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "stw/error.hpp"

namespace stw {

namespace {

std::string header(const std::string& kind, std::initializer_list<std::uint64_t> params, std::size_t count) {
  std::string s = "stw-cache " + kind + " v" + std::to_string(kCacheFormatVersion);
  for (auto x : params) s += " " + std::to_string(x);
  return s + " " + std::to_string(count) + "\n";
}

// Reads the header line and returns the record count when it matches.
std::optional<std::size_t> expect_header(std::istream& in, const std::string& kind,
                                         std::initializer_list<std::uint64_t> params) {
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  const std::string prefix = header(kind, params, 0);
  const std::string stem = prefix.substr(0, prefix.size() - 2);  // drop "0\n"
  if (line.compare(0, stem.size(), stem) != 0) return std::nullopt;
  try {
    std::size_t pos = 0;
    const std::string tail = line.substr(stem.size());
    const unsigned long long count = std::stoull(tail, &pos);
    if (pos != tail.size()) return std::nullopt;
    return static_cast<std::size_t>(count);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void write_entries(std::ostream& out, std::span<const std::uint32_t> entries) {
  for (std::uint32_t x : entries) out << ' ' << x;
}

std::optional<Subspace> read_subspace(std::istringstream& line, std::size_t n, PrimeModulus p, std::size_t dim) {
  FpMatrix m(p, dim, n);
  for (std::size_t i = 0; i < dim * n; ++i) {
    std::uint64_t x;
    if (!(line >> x) || x >= p.value()) return std::nullopt;
    m.set(i / n, i % n, static_cast<std::int64_t>(x));
  }
  // A cache file is only trusted if it holds canonical echelon bases.
  FpMatrix copy = m;
  if (rref_in_place(p, copy.mutable_data().data(), dim, n) != dim || !(copy == m)) return std::nullopt;
  return Subspace::from_echelon(std::move(m));
}

bool at_end(std::istringstream& line) {
  std::string rest;
  return !(line >> rest);
}

}  // namespace

void write_subspace_table(std::ostream& out, std::size_t n, PrimeModulus p, std::size_t k,
                          const std::vector<Subspace>& table) {
  out << header("subspaces", {n, p.value(), k}, table.size());
  for (const auto& s : table) {
    out << 's';
    write_entries(out, s.basis().data());
    out << '\n';
  }
}

std::optional<std::vector<Subspace>> read_subspace_table(std::istream& in, std::size_t n, PrimeModulus p,
                                                         std::size_t k) {
  auto count = expect_header(in, "subspaces", {n, p.value(), k});
  if (!count) return std::nullopt;
  std::vector<Subspace> out;
  out.reserve(*count);
  std::string text;
  for (std::size_t i = 0; i < *count; ++i) {
    if (!std::getline(in, text)) return std::nullopt;
    std::istringstream line(text);
    char tag;
    if (!(line >> tag) || tag != 's') return std::nullopt;
    auto s = read_subspace(line, n, p, k);
    if (!s || !at_end(line)) return std::nullopt;
    out.push_back(std::move(*s));
  }
  return out;
}

void write_splittings(std::ostream& out, std::size_t g, PrimeModulus p, const std::vector<SymplecticSplitting>& list) {
  out << header("splittings", {g, p.value()}, list.size());
  for (const auto& s : list) {
    out << s.size();
    for (const auto& part : s.parts()) {
      out << ' ' << part.dim();
      write_entries(out, part.basis().data());
    }
    out << '\n';
  }
}

std::optional<std::vector<SymplecticSplitting>> read_splittings(std::istream& in, std::size_t g, PrimeModulus p) {
  auto count = expect_header(in, "splittings", {g, p.value()});
  if (!count) return std::nullopt;
  const SymplecticSpace space(g, p);
  std::vector<SymplecticSplitting> out;
  std::string text;
  for (std::size_t i = 0; i < *count; ++i) {
    if (!std::getline(in, text)) return std::nullopt;
    std::istringstream line(text);
    std::size_t parts = 0;
    if (!(line >> parts) || parts == 0 || parts > g) return std::nullopt;
    std::vector<Subspace> list;
    for (std::size_t j = 0; j < parts; ++j) {
      std::size_t dim = 0;
      if (!(line >> dim) || dim == 0 || dim > 2 * g) return std::nullopt;
      auto s = read_subspace(line, 2 * g, p, dim);
      if (!s) return std::nullopt;
      list.push_back(std::move(*s));
    }
    if (!at_end(line)) return std::nullopt;
    try {
      out.push_back(validate_splitting(space, std::move(list)));
    } catch (const DomainError&) {
      return std::nullopt;
    }
  }
  return out;
}

void write_flag_index(std::ostream& out, const BuildingContext& ctx) {
  out << header("flags", {ctx.n(), ctx.modulus().value()}, ctx.flag_count());
  for (std::uint64_t i = 0; i < ctx.flag_count(); ++i) {
    const auto chain = ctx.decode_chain(i);
    out << 'f';
    write_entries(out, chain);
    out << '\n';
  }
}

std::optional<std::vector<std::vector<std::uint32_t>>> read_flag_index(std::istream& in, std::size_t n,
                                                                       PrimeModulus p) {
  auto count = expect_header(in, "flags", {n, p.value()});
  if (!count) return std::nullopt;
  std::vector<std::vector<std::uint32_t>> out(*count);
  std::string text;
  for (auto& chain : out) {
    if (!std::getline(in, text)) return std::nullopt;
    std::istringstream line(text);
    char tag;
    if (!(line >> tag) || tag != 'f') return std::nullopt;
    chain.resize(n - 1);
    for (auto& x : chain)
      if (!(line >> x)) return std::nullopt;
    if (!at_end(line)) return std::nullopt;
  }
  return out;
}

void write_boundaries(std::ostream& out, const BuildingChainComplex& complex) {
  const auto& ctx = complex.context();
  const int top = complex.top_degree();
  out << header("boundaries", {ctx.n(), ctx.modulus().value()}, static_cast<std::size_t>(top + 1));
  for (int r = 0; r <= top; ++r) {
    const auto& cols = complex.boundary(r);
    out << "degree " << r << ' ' << cols.size() << '\n';
    for (const auto& c : cols) {
      out << c.nnz();
      for (const auto& [i, v] : c.entries) out << ' ' << i << ' ' << v;
      out << '\n';
    }
  }
}

std::optional<std::vector<std::vector<IntVector>>> read_boundaries(std::istream& in, std::size_t n, PrimeModulus p) {
  auto count = expect_header(in, "boundaries", {n, p.value()});
  if (!count || *count != n - 1) return std::nullopt;
  std::vector<std::vector<IntVector>> out(*count);
  std::string text;
  for (std::size_t r = 0; r < *count; ++r) {
    if (!std::getline(in, text)) return std::nullopt;
    std::istringstream head(text);
    std::string word;
    std::size_t degree = 0, cols = 0;
    if (!(head >> word >> degree >> cols) || word != "degree" || degree != r) return std::nullopt;
    out[r].resize(cols);
    for (auto& c : out[r]) {
      if (!std::getline(in, text)) return std::nullopt;
      std::istringstream line(text);
      std::size_t nnz = 0;
      if (!(line >> nnz)) return std::nullopt;
      c.entries.resize(nnz);
      for (auto& [i, v] : c.entries)
        if (!(line >> i >> v)) return std::nullopt;
      if (!at_end(line)) return std::nullopt;
    }
  }
  return out;
}

// ---------------------------------------------------------------- DiskCache

DiskCache::DiskCache(std::filesystem::path root) : root_(std::move(root)) {}

namespace {

std::string suffix() { return ".v" + std::to_string(kCacheFormatVersion) + ".cache"; }

}  // namespace

std::filesystem::path DiskCache::subspace_path(std::size_t n, PrimeModulus p, std::size_t k) const {
  return root_ / ("stw-subspaces-n" + std::to_string(n) + "-p" + std::to_string(p.value()) + "-k" + std::to_string(k) +
                  suffix());
}

std::filesystem::path DiskCache::splitting_path(std::size_t g, PrimeModulus p) const {
  return root_ / ("stw-splittings-g" + std::to_string(g) + "-p" + std::to_string(p.value()) + suffix());
}

std::filesystem::path DiskCache::flag_index_path(std::size_t n, PrimeModulus p) const {
  return root_ / ("stw-flags-n" + std::to_string(n) + "-p" + std::to_string(p.value()) + suffix());
}

std::filesystem::path DiskCache::boundary_path(std::size_t n, PrimeModulus p) const {
  return root_ / ("stw-boundaries-n" + std::to_string(n) + "-p" + std::to_string(p.value()) + suffix());
}

std::filesystem::path DiskCache::snapshot_path(const std::string& name) const {
  return root_ / ("stw-snapshot-" + name + suffix());
}

void DiskCache::write_atomic(const std::filesystem::path& path, const std::string& bytes) const {
  std::filesystem::create_directories(root_);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write cache file " + tmp);
    out << bytes;
  }
  std::filesystem::rename(tmp, path);
}

std::vector<Subspace> DiskCache::subspaces(std::size_t n, PrimeModulus p, std::size_t k, bool* hit) const {
  const auto path = subspace_path(n, p, k);
  if (std::ifstream in(path, std::ios::binary); in) {
    if (auto table = read_subspace_table(in, n, p, k)) {
      if (hit) *hit = true;
      return *table;
    }
  }
  if (hit) *hit = false;
  auto table = enumerate_subspaces(n, p, k);
  std::ostringstream out;
  write_subspace_table(out, n, p, k, table);
  write_atomic(path, out.str());
  return table;
}

std::vector<SymplecticSplitting> DiskCache::splittings(std::size_t g, PrimeModulus p, bool extended, bool* hit) const {
  const SymplecticSpace space(g, p);
  check_splitting_budget(space, SplittingEnumerationOptions{extended});
  const auto path = splitting_path(g, p);
  if (std::ifstream in(path, std::ios::binary); in) {
    if (auto list = read_splittings(in, g, p)) {
      if (hit) *hit = true;
      return *list;
    }
  }
  if (hit) *hit = false;
  auto list = enumerate_splittings(space, SplittingEnumerationOptions{extended});
  std::ostringstream out;
  write_splittings(out, g, p, list);
  write_atomic(path, out.str());
  return list;
}

void DiskCache::store_flag_index(const BuildingContext& ctx) const {
  std::ostringstream out;
  write_flag_index(out, ctx);
  write_atomic(flag_index_path(ctx.n(), ctx.modulus()), out.str());
}

void DiskCache::store_boundaries(const BuildingChainComplex& complex) const {
  std::ostringstream out;
  write_boundaries(out, complex);
  write_atomic(boundary_path(complex.context().n(), complex.context().modulus()), out.str());
}

std::size_t DiskCache::clear() const {
  std::size_t removed = 0;
  if (!std::filesystem::exists(root_)) return 0;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("stw-", 0) == 0) {
      std::filesystem::remove(entry.path());
      ++removed;
    }
  }
  return removed;
}

namespace {

std::mutex& cache_mutex() {
  static std::mutex mu;
  return mu;
}

std::optional<std::filesystem::path>& cache_root() {
  static std::optional<std::filesystem::path> root;
  return root;
}

}  // namespace

void set_default_cache(std::optional<std::filesystem::path> root) {
  std::lock_guard lock(cache_mutex());
  cache_root() = std::move(root);
}

std::optional<DiskCache> default_cache() {
  std::lock_guard lock(cache_mutex());
  if (!cache_root()) return std::nullopt;
  return DiskCache(*cache_root());
}

std::vector<Subspace> load_or_enumerate_subspaces(std::size_t n, PrimeModulus p, std::size_t k) {
  if (auto cache = default_cache()) return cache->subspaces(n, p, k);
  return enumerate_subspaces(n, p, k);
}

}  // namespace stw
