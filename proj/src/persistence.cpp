#include "twotier/persistence.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "twotier/error.hpp"
#include "twotier/text.hpp"

namespace twotier::persistence {

namespace {

constexpr std::string_view kMagic = "twotier-model";

template <typename Range>
void write_values(std::ostream& out, std::string_view key, const Range& values) {
    out << key;
    for (double v : values) out << ' ' << text::format_double(v);
    out << '\n';
}

std::string encode_knn(const knn::KnnModel& model) {
    std::ostringstream out;
    out << "depth_days " << model.config().depth_days << '\n';
    out << "neighbors " << model.config().neighbors << '\n';
    out << "samples_per_day " << model.target_length() << '\n';
    out << "pair_count " << model.pairs().size() << '\n';
    for (const auto& p : model.pairs()) {
        out << "pair " << p.day_index << '\n';
        write_values(out, "context", p.context);
        write_values(out, "target", p.target);
    }
    return out.str();
}

std::string encode_nn(const nn::NnModel& model) {
    std::ostringstream out;
    out << "samples_per_day " << model.samples_per_day << '\n';
    out << "hidden_neurons " << model.hidden() << '\n';
    out << "scale_max " << text::format_double(model.scale_max) << '\n';
    std::vector<double> hw;
    for (Eigen::Index i = 0; i < model.hidden_weights.rows(); ++i) {
        hw.push_back(model.hidden_weights(i, 0));
        hw.push_back(model.hidden_weights(i, 1));
    }
    write_values(out, "hidden_weights", hw);
    write_values(out, "hidden_biases", model.hidden_biases);
    write_values(out, "output_weights", model.output_weights);
    out << "output_bias " << text::format_double(model.output_bias) << '\n';
    const auto& c = model.config;
    out << "config.restarts " << c.restarts << '\n';
    out << "config.lm_initial_damping " << text::format_double(c.lm_initial_damping) << '\n';
    out << "config.lm_damping_factor " << text::format_double(c.lm_damping_factor) << '\n';
    out << "config.max_iterations " << c.max_iterations << '\n';
    out << "config.loss_tolerance " << text::format_double(c.loss_tolerance) << '\n';
    out << "config.rng_seed " << c.rng_seed << '\n';
    return out.str();
}

/// Sequential reader over `key value...` lines.
class PayloadReader {
public:
    explicit PayloadReader(std::string_view payload) {
        for (auto line : text::split(payload, '\n')) {
            if (!line.empty()) lines_.push_back(line);
        }
    }

    std::vector<std::string_view> fields(std::string_view key) {
        if (pos_ >= lines_.size()) {
            throw Error(ErrorKind::ParseError, "missing '" + std::string(key) + "'");
        }
        auto parts = text::split(lines_[pos_++], ' ');
        if (parts.front() != key) {
            throw Error(ErrorKind::ParseError, "expected '" + std::string(key) + "', found '" +
                                                   std::string(parts.front()) + "'");
        }
        parts.erase(parts.begin());
        return parts;
    }

    std::vector<double> reals(std::string_view key) {
        std::vector<double> out;
        for (auto f : fields(key)) {
            auto v = text::parse_double(f);
            if (!v) throw Error(ErrorKind::ParseError, "bad number in '" + std::string(key) + "'");
            out.push_back(*v);
        }
        return out;
    }

    double real(std::string_view key) {
        auto v = reals(key);
        if (v.size() != 1) throw Error(ErrorKind::ParseError, "'" + std::string(key) + "' takes one value");
        return v.front();
    }

    /// Non-negative integer; a negative value is an invariant violation,
    /// not a syntax error.
    std::size_t count(std::string_view key) {
        auto f = fields(key);
        if (f.size() != 1) throw Error(ErrorKind::ParseError, "'" + std::string(key) + "' takes one value");
        auto v = text::parse_int(f.front());
        if (!v) throw Error(ErrorKind::ParseError, "bad integer in '" + std::string(key) + "'");
        if (*v < 0) {
            throw Error(ErrorKind::InvariantViolation, "'" + std::string(key) + "' is negative");
        }
        return static_cast<std::size_t>(*v);
    }

    std::uint64_t unsigned64(std::string_view key) {
        auto f = fields(key);
        if (f.size() != 1) throw Error(ErrorKind::ParseError, "'" + std::string(key) + "' takes one value");
        std::uint64_t v = 0;
        const auto field = f.front();
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
            throw Error(ErrorKind::ParseError, "bad integer in '" + std::string(key) + "'");
        }
        return v;
    }

    void finish() const {
        if (pos_ != lines_.size()) throw Error(ErrorKind::ParseError, "unexpected trailing lines");
    }

private:
    std::vector<std::string_view> lines_;
    std::size_t pos_ = 0;
};

knn::KnnModel decode_knn(std::string_view payload) {
    PayloadReader in(payload);
    knn::KnnConfig config;
    config.depth_days = in.count("depth_days");
    config.neighbors = in.count("neighbors");
    const auto spd = in.count("samples_per_day");
    const auto n_pairs = in.count("pair_count");
    std::vector<knn::TrainingPair> pairs;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        knn::TrainingPair p;
        p.day_index = in.count("pair");
        p.context = in.reals("context");
        p.target = in.reals("target");
        if (p.target.size() != spd) {
            throw Error(ErrorKind::InvariantViolation, "target length differs from samples_per_day");
        }
        pairs.push_back(std::move(p));
    }
    in.finish();
    try {
        return knn::KnnModel(config, std::move(pairs));
    } catch (const Error& e) {
        throw Error(ErrorKind::InvariantViolation, e.what());
    }
}

nn::NnModel decode_nn(std::string_view payload) {
    PayloadReader in(payload);
    nn::NnModel model;
    model.samples_per_day = in.count("samples_per_day");
    const auto h = static_cast<Eigen::Index>(in.count("hidden_neurons"));
    model.scale_max = in.real("scale_max");
    const auto hw = in.reals("hidden_weights");
    const auto hb = in.reals("hidden_biases");
    const auto ow = in.reals("output_weights");
    if (hw.size() != static_cast<std::size_t>(2 * h) || hb.size() != static_cast<std::size_t>(h) ||
        ow.size() != static_cast<std::size_t>(h)) {
        throw Error(ErrorKind::InvariantViolation, "weight counts do not match hidden_neurons");
    }
    model.hidden_weights.resize(h, 2);
    for (Eigen::Index i = 0; i < h; ++i) {
        model.hidden_weights(i, 0) = hw[static_cast<std::size_t>(2 * i)];
        model.hidden_weights(i, 1) = hw[static_cast<std::size_t>(2 * i + 1)];
    }
    model.hidden_biases = Eigen::Map<const Eigen::VectorXd>(hb.data(), h);
    model.output_weights = Eigen::Map<const Eigen::VectorXd>(ow.data(), h);
    model.output_bias = in.real("output_bias");
    auto& c = model.config;
    c.hidden_neurons = static_cast<std::size_t>(h);
    c.restarts = in.count("config.restarts");
    c.lm_initial_damping = in.real("config.lm_initial_damping");
    c.lm_damping_factor = in.real("config.lm_damping_factor");
    c.max_iterations = in.count("config.max_iterations");
    c.loss_tolerance = in.real("config.loss_tolerance");
    c.rng_seed = in.unsigned64("config.rng_seed");
    in.finish();
    model.validate();
    try {
        c.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::InvariantViolation, e.what());
    }
    return model;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Reads one '\n'-terminated header line starting at `pos`.
std::string_view header_line(std::string_view text, std::size_t& pos) {
    const auto end = text.find('\n', pos);
    if (end == std::string_view::npos) throw Error(ErrorKind::ParseError, "truncated header");
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    return line;
}

std::string_view header_value(std::string_view line, std::string_view key) {
    if (line.size() <= key.size() + 1 || line.substr(0, key.size()) != key || line[key.size()] != ' ') {
        throw Error(ErrorKind::ParseError, "expected header '" + std::string(key) + "'");
    }
    return line.substr(key.size() + 1);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string encode_payload(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, knn::KnnModel>) {
                return encode_knn(m);
            } else {
                m.validate();
                return encode_nn(m);
            }
        },
        model);
}

std::string wrap_envelope(std::string_view kind, std::string_view payload, int version) {
    std::ostringstream out;
    out << kMagic << '\n'
        << "version " << version << '\n'
        << "kind " << kind << '\n'
        << "payload_bytes " << payload.size() << '\n'
        << "checksum " << hex64(fnv1a64(payload)) << '\n'
        << payload;
    return out.str();
}

std::string save_model_string(const AnyModel& model) {
    const auto kind = std::holds_alternative<knn::KnnModel>(model) ? "knn" : "nn";
    return wrap_envelope(kind, encode_payload(model));
}

void save_model(const AnyModel& model, std::ostream& sink) {
    const auto text = save_model_string(model);
    sink.write(text.data(), static_cast<std::streamsize>(text.size()));
    sink.flush();
    if (!sink) throw Error(ErrorKind::SinkWriteFailure, "model stream write failed");
}

void save_model_file(const AnyModel& model, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::SinkWriteFailure, "cannot open " + tmp.string());
        save_model(model, out);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::SinkWriteFailure, "cannot write " + path.string() + ": " + ec.message());
}

AnyModel load_model_string(std::string_view text) {
    std::size_t pos = 0;
    if (header_line(text, pos) != kMagic) throw Error(ErrorKind::ParseError, "not a model file");
    const auto version = text::parse_int(header_value(header_line(text, pos), "version"));
    if (!version) throw Error(ErrorKind::ParseError, "bad version");
    if (*version != kFormatVersion) {
        throw Error(ErrorKind::UnsupportedVersion, "format version " + std::to_string(*version) +
                                                       " (supported: " +
                                                       std::to_string(kFormatVersion) + ")");
    }
    const auto kind = header_value(header_line(text, pos), "kind");
    if (kind != "knn" && kind != "nn") {
        throw Error(ErrorKind::ParseError, "unknown model kind '" + std::string(kind) + "'");
    }
    const auto bytes = text::parse_int(header_value(header_line(text, pos), "payload_bytes"));
    if (!bytes || *bytes < 0) throw Error(ErrorKind::ParseError, "bad payload_bytes");
    const auto checksum = header_value(header_line(text, pos), "checksum");

    const auto payload = text.substr(pos);
    if (payload.size() < static_cast<std::size_t>(*bytes)) {
        throw Error(ErrorKind::ParseError, "truncated payload");
    }
    if (payload.size() > static_cast<std::size_t>(*bytes)) {
        throw Error(ErrorKind::ParseError, "trailing bytes after payload");
    }
    if (checksum != hex64(fnv1a64(payload))) {
        throw Error(ErrorKind::ChecksumMismatch, "payload checksum does not match");
    }
    if (kind == "knn") return decode_knn(payload);
    return decode_nn(payload);
}

AnyModel load_model(std::istream& source) {
    std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    return load_model_string(text);
}

AnyModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path.string());
    return load_model(in);
}

}  // namespace twotier::persistence
