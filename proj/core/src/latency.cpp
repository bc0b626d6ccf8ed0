#include "specdec/latency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace specdec {

namespace {

double parse_number(std::string_view s, std::string_view what) {
    std::string text(s);
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty())
        throw std::invalid_argument("latency: bad " + std::string(what) + " '" + text + "'");
    return v;
}

// Guards against 2.0000000001 rounding up to 3.
int volume_multiple(double volume) { return std::max(1, static_cast<int>(std::ceil(volume - 1e-9))); }

}  // namespace

LatencyModel load_empirical_latency(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("latency: cannot open empirical file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("latency: malformed empirical file: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("latency: empirical file must map volume multiples to lists");
    LatencyModel m;
    m.kind = LatencyModel::Kind::Empirical;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const int k = static_cast<int>(parse_number(it.key(), "volume multiple"));
        if (!it->is_array() || it->empty())
            throw std::invalid_argument("latency: bucket " + it.key() + " must be a non-empty list");
        for (const auto& v : *it) {
            if (!v.is_number()) throw std::invalid_argument("latency: bucket " + it.key() + " holds a non-number");
            m.buckets[k].push_back(v.get<double>());
        }
    }
    return m;
}

LatencyModel parse_latency_model(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("latency: expected KIND:VALUE, got '" + std::string(text) + "'");
    const std::string_view kind = text.substr(0, colon);
    std::string_view value = text.substr(colon + 1);
    if (kind == "fixed") {
        if (!value.empty() && value.back() == 'd') {
            value.remove_suffix(1);
            return LatencyModel::fixed_d(value.empty() ? 1.0 : parse_number(value, "fixed latency"));
        }
        return LatencyModel::fixed(parse_number(value, "fixed latency"));
    }
    if (kind == "linear") return LatencyModel::linear(parse_number(value, "linear factor"));
    if (kind == "empirical") return load_empirical_latency(std::string(value));
    throw std::invalid_argument("latency: unknown kind '" + std::string(kind) + "'");
}

std::string describe(const LatencyModel& m) {
    std::ostringstream out;
    switch (m.kind) {
        case LatencyModel::Kind::Fixed: out << "fixed:" << m.fixed_rounds << (m.fixed_per_d ? "d" : ""); break;
        case LatencyModel::Kind::Linear: out << "linear:" << m.r; break;
        case LatencyModel::Kind::Empirical: out << "empirical(" << m.buckets.size() << " buckets)"; break;
    }
    return out.str();
}

int decode_latency(double volume, int d, const LatencyModel& m, std::mt19937_64& rng) {
    if (!(volume > 0)) throw std::invalid_argument("decode_latency: volume must be positive");
    double t = 0;
    switch (m.kind) {
        case LatencyModel::Kind::Fixed: t = m.fixed_per_d ? m.fixed_rounds * d : m.fixed_rounds; break;
        case LatencyModel::Kind::Linear: t = m.r * volume_multiple(volume) * d; break;
        case LatencyModel::Kind::Empirical: {
            const int k = volume_multiple(volume);
            auto it = m.buckets.find(k);
            if (it == m.buckets.end())
                throw std::invalid_argument("decode_latency: no empirical bucket for volume " + std::to_string(k) + "d^3");
            std::uniform_int_distribution<std::size_t> pick(0, it->second.size() - 1);
            t = it->second[pick(rng)];
            break;
        }
    }
    return std::max(1, static_cast<int>(std::ceil(t - 1e-9)));
}

}  // namespace specdec
