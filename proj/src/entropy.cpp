#include "xmppsteg/entropy.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "xmppsteg/errors.hpp"

namespace xmppsteg {

namespace {

constexpr int kMonteCarloBytes = 6;

}  // namespace

EntReport ent_battery(std::string_view data) {
    if (data.empty()) throw EmptyInput();
    std::array<std::uint64_t, 256> counts{};

    // Monte Carlo: consecutive 6-byte groups are (x, y) points with 24-bit
    // coordinates; pi is four times the share falling inside the quarter circle.
    const double radius = 256.0 * 256.0 * 256.0 - 1.0;
    const double incirc = radius * radius;
    std::uint64_t mc_points = 0, mc_inside = 0;

    // Serial correlation between each byte and the next, wrapping the last
    // byte onto the first.
    double t1 = 0, t2 = 0, t3 = 0;
    double last = 0;
    const double first = static_cast<unsigned char>(data.front());

    const std::size_t n = data.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto byte = static_cast<unsigned char>(data[i]);
        ++counts[byte];
        const double c = byte;
        if (i > 0) t1 += last * c;
        t2 += c;
        t3 += c * c;
        last = c;
    }
    t1 += last * first;

    for (std::size_t i = 0; i + kMonteCarloBytes <= n; i += kMonteCarloBytes) {
        double x = 0, y = 0;
        for (int k = 0; k < 3; ++k) x = x * 256.0 + static_cast<unsigned char>(data[i + k]);
        for (int k = 3; k < 6; ++k) y = y * 256.0 + static_cast<unsigned char>(data[i + k]);
        ++mc_points;
        if (x * x + y * y <= incirc) ++mc_inside;
    }

    EntReport r;
    r.byte_count = n;
    const double total = static_cast<double>(n);
    const double expected = total / 256.0;
    double entropy = 0, chi = 0, sum = 0;
    for (int b = 0; b < 256; ++b) {
        const double count = static_cast<double>(counts[b]);
        const double diff = count - expected;
        chi += diff * diff / expected;
        sum += count * b;
        if (counts[b] > 0) {
            const double p = count / total;
            entropy -= p * std::log2(p);
        }
    }
    r.entropy_bits_per_byte = entropy == 0 ? 0.0 : entropy;  // no negative zero
    r.chi_square = chi;
    r.chi_square_p = boost::math::gamma_q(255.0 / 2.0, chi / 2.0);
    r.arithmetic_mean = sum / total;
    r.monte_carlo_pi = mc_points == 0 ? 0.0 : 4.0 * static_cast<double>(mc_inside) / static_cast<double>(mc_points);

    const double denom = total * t3 - t2 * t2;
    r.serial_correlation = denom == 0 ? 0.0 : (total * t1 - t2 * t2) / denom;
    return r;
}

EntDelta operator-(const EntReport& variant, const EntReport& control) {
    EntDelta d;
    d.entropy_bits_per_byte = variant.entropy_bits_per_byte - control.entropy_bits_per_byte;
    d.chi_square = variant.chi_square - control.chi_square;
    d.chi_square_p = variant.chi_square_p - control.chi_square_p;
    d.arithmetic_mean = variant.arithmetic_mean - control.arithmetic_mean;
    d.monte_carlo_pi = variant.monte_carlo_pi - control.monte_carlo_pi;
    d.serial_correlation = variant.serial_correlation - control.serial_correlation;
    d.byte_count = static_cast<std::int64_t>(variant.byte_count) - static_cast<std::int64_t>(control.byte_count);
    return d;
}

EntropyComparison compare_bytes(std::string_view control,
                                const std::vector<std::pair<std::string, std::string>>& variants) {
    EntropyComparison cmp;
    cmp.control = ent_battery(control);
    for (const auto& [name, bytes] : variants) {
        EntReport r = ent_battery(bytes);
        cmp.variants.push_back({name, r, r - cmp.control});
    }
    return cmp;
}

EntropyComparison compare_sessions(const SessionTranscript& control,
                                   const std::vector<std::pair<std::string, SessionTranscript>>& variants) {
    std::vector<std::pair<std::string, std::string>> bytes;
    bytes.reserve(variants.size());
    for (const auto& [name, t] : variants) bytes.emplace_back(name, transcript_bytes(t));
    return compare_bytes(transcript_bytes(control), bytes);
}

std::string format_entropy_table(const EntropyComparison& cmp) {
    std::size_t width = 7;  // "Control"
    for (const auto& v : cmp.variants) width = std::max(width, v.name.size());
    std::ostringstream out;
    char buf[64];
    auto row = [&](const std::string& name, double entropy, const double* diff) {
        out << name << std::string(width - name.size() + 2, ' ');
        std::snprintf(buf, sizeof buf, "%.6f", entropy);
        out << buf;
        if (diff) {
            std::snprintf(buf, sizeof buf, "  %+.6f", *diff);
            out << buf;
        }
        out << '\n';
    };
    out << "Channel" << std::string(width - 7 + 2, ' ') << "Entropy   Difference\n";
    row("Control", cmp.control.entropy_bits_per_byte, nullptr);
    for (const auto& v : cmp.variants) row(v.name, v.report.entropy_bits_per_byte, &v.difference.entropy_bits_per_byte);
    return out.str();
}

nlohmann::json to_json(const EntReport& r) {
    return {
        {"entropy_bits_per_byte", r.entropy_bits_per_byte},
        {"chi_square", r.chi_square},
        {"chi_square_p", r.chi_square_p},
        {"arithmetic_mean", r.arithmetic_mean},
        {"monte_carlo_pi", r.monte_carlo_pi},
        {"serial_correlation", r.serial_correlation},
        {"byte_count", r.byte_count},
    };
}

nlohmann::json to_json(const EntropyComparison& cmp) {
    nlohmann::json doc;
    doc["control"] = to_json(cmp.control);
    doc["variants"] = nlohmann::json::array();
    for (const auto& v : cmp.variants) {
        const auto& d = v.difference;
        doc["variants"].push_back({
            {"name", v.name},
            {"report", to_json(v.report)},
            {"difference",
             {{"entropy_bits_per_byte", d.entropy_bits_per_byte},
              {"chi_square", d.chi_square},
              {"chi_square_p", d.chi_square_p},
              {"arithmetic_mean", d.arithmetic_mean},
              {"monte_carlo_pi", d.monte_carlo_pi},
              {"serial_correlation", d.serial_correlation},
              {"byte_count", d.byte_count}}},
        });
    }
    return doc;
}

}  // namespace xmppsteg
