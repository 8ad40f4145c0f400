#include "bel/grid.hpp"

#include "bel/fft.hpp"

#include <cstdio>
#include <cstring>

namespace bel {

const Spectrum& ScalarField::spectrum() const {
    std::call_once(cache_->once, [this] {
        if (!cache_->spec)
            cache_->spec = std::make_shared<const Spectrum>(fft::forward(*this));
    });
    return *cache_->spec;
}

namespace {
constexpr char kMagic[4] = {'B', 'E', 'L', '1'};
}

void write_snapshot(const std::string& path, const ScalarField& f) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot open for writing: " + path);
    const std::uint32_t n = std::uint32_t(f.grid().n);
    const double L = f.grid().half_width;
    bool ok = std::fwrite(kMagic, 1, 4, fp) == 4 &&
              std::fwrite(&n, sizeof n, 1, fp) == 1 &&
              std::fwrite(&L, sizeof L, 1, fp) == 1 &&
              std::fwrite(f.data(), sizeof(double), f.grid().size(), fp) == f.grid().size();
    std::fclose(fp);
    if (!ok) throw std::runtime_error("short write: " + path);
}

ScalarField read_snapshot(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    std::uint32_t n = 0;
    double L = 0.0;
    bool ok = std::fread(magic, 1, 4, fp) == 4 && std::memcmp(magic, kMagic, 4) == 0 &&
              std::fread(&n, sizeof n, 1, fp) == 1 && std::fread(&L, sizeof L, 1, fp) == 1;
    if (!ok) {
        std::fclose(fp);
        throw std::runtime_error("not a BEL1 snapshot: " + path);
    }
    GridSpec g(int(n), L);
    std::vector<double> vals(g.size());
    ok = std::fread(vals.data(), sizeof(double), vals.size(), fp) == vals.size();
    std::fclose(fp);
    if (!ok) throw std::runtime_error("truncated snapshot: " + path);
    return {g, std::move(vals)};
}

} // namespace bel
