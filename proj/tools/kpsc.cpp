// Command-line front end: encode, decode, bench, inspect.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kpsc/kpsc.hpp"

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes;
    char c;
    while (in.get(c)) bytes.push_back(static_cast<std::uint8_t>(c));
    return bytes;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::string real_field(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = text.find(sep, start);
        parts.push_back(text.substr(start, at == std::string::npos ? at : at - start));
        if (at == std::string::npos) break;
        start = at + 1;
    }
    return parts;
}

std::uint64_t parse_u64(const std::string& field, const std::string& what,
                        std::uint64_t max = UINT64_MAX) {
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(field, &used);
        if (used != field.size() || value > max) throw std::invalid_argument(what);
        return value;
    } catch (const std::exception&) {
        throw std::runtime_error("malformed " + what + ": '" + field + "'");
    }
}

double parse_real(const std::string& field, const std::string& what) {
    try {
        std::size_t used = 0;
        const double value = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(what);
        return value;
    } catch (const std::exception&) {
        throw std::runtime_error("malformed " + what + ": '" + field + "'");
    }
}

kpsc::SelectionWeights parse_weights(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw std::runtime_error("weights must be three values A,B,C");
    kpsc::SelectionWeights w;
    w.prev1 = static_cast<std::uint8_t>(parse_u64(parts[0], "weight", 255));
    w.prev2 = static_cast<std::uint8_t>(parse_u64(parts[1], "weight", 255));
    w.parent = static_cast<std::uint8_t>(parse_u64(parts[2], "weight", 255));
    if (!w.prev1 || !w.prev2 || !w.parent)
        throw std::runtime_error("weights must be positive");
    return w;
}

kpsc::QuantScale parse_scale(const std::string& text) {
    const auto parts = split(text, '/');
    if (parts.empty() || parts.size() > 2)
        throw std::runtime_error("scale must be N or N/D");
    kpsc::QuantScale scale;
    scale.num = static_cast<std::uint32_t>(parse_u64(parts[0], "scale numerator", 0xFFFFFFFFull));
    scale.den = parts.size() == 2 ? static_cast<std::uint32_t>(
                                        parse_u64(parts[1], "scale denominator", 0xFFFFFFFFull))
                                  : 1;
    if (!scale.num || !scale.den) throw std::runtime_error("scale must be positive");
    return scale;
}

kpsc::IncidenceProfile resolve_profile(const std::string& name, const std::string& file) {
    if (!name.empty() && !file.empty())
        throw std::runtime_error("use either --profile or --profile-file, not both");
    if (!file.empty()) return kpsc::parse_profile_text(read_text(file));
    const kpsc::IncidenceProfile* builtin = kpsc::find_builtin_profile(name);
    if (!builtin) throw std::runtime_error("unknown profile '" + name + "'");
    return *builtin;
}

struct EncodeArgs {
    std::string input, output;
    std::string format = "kpjson";
    std::string profile, profile_file, weights, scale;
};

struct DecodeArgs {
    std::string input, output;
};

struct BenchArgs {
    std::string synthetic;
    std::vector<std::string> inputs;
    std::string skips = "0", sigmas = "0", configs = "adaptive";
    std::string out_csv, out_json, weights;
    std::string profile, profile_file;
    std::uint64_t seed = 1;
    std::uint32_t frames = 50, objects = 3;
    double step_std = 2.0, jitter_std = 1.0, occlusion = 0.0, churn = 0.0;
};

struct InspectArgs {
    std::string input;
};

int run_encode(const EncodeArgs& args, bool quiet) {
    kpsc::Sequence seq;
    kpsc::QuantScale scale;
    const bool scale_given = !args.scale.empty();
    if (scale_given) scale = parse_scale(args.scale);
    if (args.format == "mot") {
        seq = kpsc::parse_mot(read_text(args.input), scale);
    } else {
        kpsc::KpjsonDocument doc = kpsc::parse_kpjson(read_text(args.input));
        seq = std::move(doc.sequence);
        if (!scale_given) scale = doc.scale;
    }
    if (!args.profile.empty() || !args.profile_file.empty())
        seq.profile = resolve_profile(args.profile, args.profile_file);

    kpsc::CodecConfig config;
    if (!args.weights.empty()) config.weights = parse_weights(args.weights);
    config.scale = scale;
    const kpsc::EncodedStream stream = kpsc::encode_sequence(seq, config);
    write_bytes(args.output, stream.bytes);

    if (!quiet) {
        const std::uint64_t points = seq.visible_points();
        std::cout << "frames: " << seq.frames.size() << "\n"
                  << "points: " << points << "\n"
                  << "payload_bits: " << stream.stats.payload_bits << "\n";
        if (points > 0) {
            std::cout << "bits_per_point: " << real_field(kpsc::bits_per_point(stream, seq))
                      << "\n"
                      << "ratio_percent: " << real_field(kpsc::compression_ratio(stream, seq))
                      << "\n";
        }
    }
    return 0;
}

int run_decode(const DecodeArgs& args, bool quiet) {
    const std::vector<std::uint8_t> bytes = read_bytes(args.input);
    const kpsc::DecodeResult result = kpsc::decode_sequence(bytes);
    write_text(args.output, kpsc::write_kpjson(result.sequence, result.header.scale));
    if (!quiet) {
        std::cout << "frames: " << result.sequence.frames.size() << "\n"
                  << "points: " << result.sequence.visible_points() << "\n";
    }
    return 0;
}

int run_inspect(const InspectArgs& args) {
    const std::vector<std::uint8_t> bytes = read_bytes(args.input);
    const kpsc::DecodeResult result = kpsc::decode_sequence(bytes);
    const kpsc::StreamHeader& header = result.header;
    std::cout << "profile: " << header.profile.name << " ("
              << header.profile.point_count << " points, " << int(header.profile.dims)
              << " dims, " << header.profile.edges.size() << " edges)\n"
              << "weights: " << int(header.weights.prev1) << "," << int(header.weights.prev2)
              << "," << int(header.weights.parent) << "\n"
              << "scale: " << header.scale.num << "/" << header.scale.den << "\n"
              << "frames: " << header.frame_count << "\n"
              << "header_bytes: " << result.header_bytes << "\n"
              << "payload_bits: " << result.stats.payload_bits << "\n"
              << "aux_bits: " << result.stats.aux_bits << "\n"
              << "mode_counts: independent=" << result.stats.mode_counts[0]
              << " temporal=" << result.stats.mode_counts[1]
              << " spatial_temporal=" << result.stats.mode_counts[2]
              << " trajectory=" << result.stats.mode_counts[3] << "\n";
    for (std::size_t f = 0; f < result.stats.frame_bits.size(); ++f) {
        const kpsc::FrameBits& fb = result.stats.frame_bits[f];
        std::cout << "frame " << f << ": " << fb.total << " bits (aux " << fb.aux << ")\n";
    }
    return 0;
}

int run_bench(const BenchArgs& args, bool quiet) {
    std::vector<kpsc::NamedSequence> inputs;
    if (!args.synthetic.empty()) {
        const auto kind = kpsc::synth_from_name(args.synthetic);
        if (!kind)
            throw std::runtime_error(
                "unknown synthetic kind '" + args.synthetic +
                "' (expected static, constant_velocity, random_walk, articulated)");
        kpsc::SynthParams params;
        params.kind = *kind;
        if (!args.profile.empty() || !args.profile_file.empty())
            params.profile = resolve_profile(args.profile, args.profile_file);
        params.frames = args.frames;
        params.objects = args.objects;
        params.step_std = args.step_std;
        params.jitter_std = args.jitter_std;
        params.occlusion = args.occlusion;
        params.churn = args.churn;
        inputs.push_back({std::string(kpsc::synth_name(*kind)),
                          kpsc::synth_generate(params, args.seed)});
    }
    for (const std::string& path : args.inputs)
        inputs.push_back({std::filesystem::path(path).stem().string(),
                          kpsc::parse_kpjson(read_text(path)).sequence});
    if (inputs.empty()) throw std::runtime_error("nothing to bench: use --synthetic or --input");

    std::vector<std::uint32_t> skips;
    for (const std::string& field : split(args.skips, ','))
        skips.push_back(static_cast<std::uint32_t>(parse_u64(field, "skip", 0xFFFFFFFFull)));
    std::vector<double> sigmas;
    for (const std::string& field : split(args.sigmas, ',')) {
        const double sigma = parse_real(field, "sigma");
        if (sigma < 0) throw std::runtime_error("sigma must be non-negative");
        sigmas.push_back(sigma);
    }
    std::vector<kpsc::CodingPolicy> configs;
    for (const std::string& field : split(args.configs, ',')) {
        const auto policy = kpsc::policy_from_name(field);
        if (!policy)
            throw std::runtime_error("unknown config '" + field +
                                     "' (expected adaptive, independent, temporal, "
                                     "spatial-temporal, trajectory)");
        configs.push_back(*policy);
    }

    kpsc::CodecConfig base;
    if (!args.weights.empty()) base.weights = parse_weights(args.weights);
    const std::vector<kpsc::MetricRow> rows =
        kpsc::run_matrix(inputs, skips, sigmas, configs, args.seed, base);

    bool wrote = false;
    if (!args.out_csv.empty()) {
        write_text(args.out_csv, kpsc::matrix_csv(rows));
        wrote = true;
    }
    if (!args.out_json.empty()) {
        write_text(args.out_json, kpsc::matrix_json(rows));
        wrote = true;
    }
    if (!wrote)
        std::cout << kpsc::matrix_csv(rows);
    else if (!quiet)
        std::cout << "rows: " << rows.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lossless key-point sequence codec", "kpsc"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Suppress summary output");

    EncodeArgs enc;
    CLI::App* encode = app.add_subcommand("encode", "Compress key-point data into .kpsc");
    encode->add_option("input", enc.input, "Input data file")
        ->required()
        ->check(CLI::ExistingFile);
    encode->add_option("-o,--output", enc.output, "Output .kpsc path")->required();
    encode->add_option("--format", enc.format, "Input format")
        ->check(CLI::IsMember({"kpjson", "mot"}));
    encode->add_option("--profile", enc.profile, "Built-in profile overriding the input's");
    encode->add_option("--profile-file", enc.profile_file, "Custom profile text file")
        ->check(CLI::ExistingFile);
    encode->add_option("--weights", enc.weights, "Mode voting weights A,B,C");
    encode->add_option("--scale", enc.scale, "Quantization scale N or N/D");

    DecodeArgs dec;
    CLI::App* decode = app.add_subcommand("decode", "Expand a .kpsc stream to kpjson");
    decode->add_option("input", dec.input, "Input .kpsc file")
        ->required()
        ->check(CLI::ExistingFile);
    decode->add_option("-o,--output", dec.output, "Output kpjson path")->required();

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Run the evaluation matrix");
    bench_cmd->add_option("--synthetic", bench.synthetic,
                          "Generate a synthetic sequence of this kind");
    bench_cmd->add_option("--input", bench.inputs, "kpjson file(s) to evaluate")
        ->check(CLI::ExistingFile);
    bench_cmd->add_option("--skips", bench.skips, "Comma list of frame-skip counts");
    bench_cmd->add_option("--sigmas", bench.sigmas, "Comma list of noise deviations");
    bench_cmd->add_option("--configs", bench.configs, "Comma list of coder configurations");
    bench_cmd->add_option("--seed", bench.seed, "Generation and noise seed");
    bench_cmd->add_option("--out-csv", bench.out_csv, "Write the CSV report here");
    bench_cmd->add_option("--out-json", bench.out_json, "Write the JSON report here");
    bench_cmd->add_option("--weights", bench.weights, "Mode voting weights A,B,C");
    bench_cmd->add_option("--profile", bench.profile, "Synthetic profile name");
    bench_cmd->add_option("--profile-file", bench.profile_file, "Synthetic profile file")
        ->check(CLI::ExistingFile);
    bench_cmd->add_option("--frames", bench.frames, "Synthetic frame count");
    bench_cmd->add_option("--objects", bench.objects, "Synthetic object count");
    bench_cmd->add_option("--step-std", bench.step_std, "Synthetic step deviation");
    bench_cmd->add_option("--jitter-std", bench.jitter_std, "Articulated drift deviation");
    bench_cmd->add_option("--occlusion", bench.occlusion, "Point occlusion probability");
    bench_cmd->add_option("--churn", bench.churn, "Object absence probability");

    InspectArgs ins;
    CLI::App* inspect = app.add_subcommand("inspect", "Describe an existing .kpsc stream");
    inspect->add_option("input", ins.input, "Input .kpsc file")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (encode->parsed()) return run_encode(enc, quiet);
        if (decode->parsed()) return run_decode(dec, quiet);
        if (bench_cmd->parsed()) return run_bench(bench, quiet);
        if (inspect->parsed()) return run_inspect(ins);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
