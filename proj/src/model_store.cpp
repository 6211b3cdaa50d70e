#include "seatrend/model_store.hpp"

#include <cstring>
#include <fstream>

#include "seatrend/errors.hpp"

namespace seatrend {

namespace {

constexpr char kMagic[4] = {'M', 'D', 'L', '1'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    out.write(raw, sizeof(T));
}

template <typename T>
T take(std::istream& in) {
    char raw[sizeof(T)];
    in.read(raw, sizeof(T));
    if (!in) throw FormatError("mdl1: truncated file");
    T v;
    std::memcpy(&v, raw, sizeof(T));
    return v;
}

} // namespace

void write_models(const std::vector<ClusterModel>& models,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("mdl1: cannot open " + path.string());

    out.write(kMagic, 4);
    put<std::uint16_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(models.size()));

    for (const auto& m : models) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(m.mlp.layer_sizes.size()));
        for (int s : m.mlp.layer_sizes) put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
        put<double>(out, m.mlp.dropout_rate);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(m.mlp.dropout_layer));
        put<std::uint64_t>(out, m.seed);

        put<std::uint32_t>(out, static_cast<std::uint32_t>(m.scaler.x_min.size()));
        for (std::size_t c = 0; c < m.scaler.x_min.size(); ++c) {
            put<double>(out, m.scaler.x_min[c]);
            put<double>(out, m.scaler.x_max[c]);
        }
        put<double>(out, m.scaler.y_min);
        put<double>(out, m.scaler.y_max);

        for (const auto& w : m.mlp.weights)
            for (double v : w.data) put<double>(out, v);
        for (const auto& b : m.mlp.biases)
            for (double v : b) put<double>(out, v);
    }
    if (!out) throw FormatError("mdl1: short write to " + path.string());
}

std::vector<ClusterModel> read_models(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("mdl1: cannot open " + path.string());

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("mdl1: bad magic in " + path.string());
    if (take<std::uint16_t>(in) != kVersion)
        throw FormatError("mdl1: unsupported version");

    const auto count = take<std::uint32_t>(in);
    std::vector<ClusterModel> models(count);
    for (auto& m : models) {
        const auto n_layers = take<std::uint32_t>(in);
        if (n_layers < 2) throw FormatError("mdl1: net needs input and output layers");
        std::vector<int> sizes(n_layers);
        for (auto& s : sizes) s = static_cast<int>(take<std::uint32_t>(in));
        const double dropout = take<double>(in);
        const int dropout_layer = static_cast<int>(take<std::uint32_t>(in));
        m.seed = take<std::uint64_t>(in);

        std::vector<int> hidden(sizes.begin() + 1, sizes.end() - 1);
        m.mlp = make_mlp(sizes.front(), hidden, dropout,
                         hidden.empty() ? 0 : dropout_layer);

        const auto n_feat = take<std::uint32_t>(in);
        m.scaler.x_min.resize(n_feat);
        m.scaler.x_max.resize(n_feat);
        for (std::uint32_t c = 0; c < n_feat; ++c) {
            m.scaler.x_min[c] = take<double>(in);
            m.scaler.x_max[c] = take<double>(in);
        }
        m.scaler.y_min = take<double>(in);
        m.scaler.y_max = take<double>(in);
        m.scaler.fitted = true;

        for (auto& w : m.mlp.weights)
            for (double& v : w.data) v = take<double>(in);
        for (auto& b : m.mlp.biases)
            for (double& v : b) v = take<double>(in);
    }
    return models;
}

} // namespace seatrend
