#include "rmi/rmi.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace rmi {

namespace {

std::string upper_case(std::string_view text) {
    std::string out(text);
    for (auto &ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return out;
}

ModelType checked_model_type(std::uint8_t code) {
    if (code > static_cast<std::uint8_t>(ModelType::Radix)) throw FormatError("index: unknown model type code");
    return static_cast<ModelType>(code);
}

BoundKind checked_bound_kind(std::uint8_t code) {
    if (code > static_cast<std::uint8_t>(BoundKind::LocalIndividual)) throw FormatError("index: unknown bound kind code");
    return static_cast<BoundKind>(code);
}

bool root_matches(ModelType type, const Model &root) {
    switch (type) {
        case ModelType::LinearRegression:
        case ModelType::LinearSpline: return std::holds_alternative<LinearModel>(root);
        case ModelType::CubicSpline: return std::holds_alternative<CubicModel>(root);
        case ModelType::Radix: return std::holds_alternative<RadixModel>(root);
    }
    return false;
}

class ByteWriter
{
    std::vector<std::uint8_t> bytes_;

    public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }
};

class ByteReader
{
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;

    void need(std::size_t count) const {
        if (bytes_.size() - pos_ < count) throw FormatError("index: truncated byte stream");
    }

    public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) { }

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    bool match(std::string_view s) {
        need(s.size());
        const bool ok = std::memcmp(bytes_.data() + pos_, s.data(), s.size()) == 0;
        pos_ += s.size();
        return ok;
    }
};

constexpr std::string_view magic = "RMI1";

} // namespace

std::string_view to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::None: return "NB";
        case BoundKind::GlobalAbsolute: return "GAbs";
        case BoundKind::GlobalIndividual: return "GInd";
        case BoundKind::LocalAbsolute: return "LAbs";
        case BoundKind::LocalIndividual: return "LInd";
    }
    return "?";
}

BoundKind parse_bound_kind(std::string_view text) {
    const std::string upper = upper_case(text);
    if (upper == "NB") return BoundKind::None;
    if (upper == "GABS") return BoundKind::GlobalAbsolute;
    if (upper == "GIND") return BoundKind::GlobalIndividual;
    if (upper == "LABS") return BoundKind::LocalAbsolute;
    if (upper == "LIND") return BoundKind::LocalIndividual;
    throw std::invalid_argument("unknown bound kind: " + std::string(text));
}

std::size_t bound_bytes(BoundKind kind, std::size_t layer2_size) {
    switch (kind) {
        case BoundKind::None: return 0;
        case BoundKind::GlobalAbsolute: return 8;
        case BoundKind::GlobalIndividual: return 16;
        case BoundKind::LocalAbsolute: return 8 * layer2_size;
        case BoundKind::LocalIndividual: return 16 * layer2_size;
    }
    return 0;
}

void RmiConfig::validate() const {
    if (!std::has_single_bit(layer2_size) || layer2_size < min_layer2_size || layer2_size > max_layer2_size)
        throw std::invalid_argument("RmiConfig: layer2_size must be a power of two in [2^6, 2^25], got "
                                    + std::to_string(layer2_size));
    if (leaf != ModelType::LinearRegression && leaf != ModelType::LinearSpline)
        throw std::invalid_argument("RmiConfig: leaf models must be LR or LS");
    if (static_cast<std::uint8_t>(root) > static_cast<std::uint8_t>(ModelType::Radix))
        throw std::invalid_argument("RmiConfig: unknown root model type");
    if (static_cast<std::uint8_t>(bounds) > static_cast<std::uint8_t>(BoundKind::LocalIndividual))
        throw std::invalid_argument("RmiConfig: unknown bound kind");
}

ErrorBounds ErrorBounds::global_absolute(std::uint64_t err) {
    ErrorBounds b;
    b.kind_ = BoundKind::GlobalAbsolute;
    b.absolute_ = {err};
    return b;
}

ErrorBounds ErrorBounds::global_individual(Slack slack) {
    ErrorBounds b;
    b.kind_ = BoundKind::GlobalIndividual;
    b.individual_ = {slack};
    return b;
}

ErrorBounds ErrorBounds::local_absolute(std::vector<std::uint64_t> errs) {
    ErrorBounds b;
    b.kind_ = BoundKind::LocalAbsolute;
    b.absolute_ = std::move(errs);
    return b;
}

ErrorBounds ErrorBounds::local_individual(std::vector<Slack> slacks) {
    ErrorBounds b;
    b.kind_ = BoundKind::LocalIndividual;
    b.individual_ = std::move(slacks);
    return b;
}

BoundsAccumulator::BoundsAccumulator(BoundKind kind, std::size_t layer2_size)
    : kind_(kind), slacks_(kind == BoundKind::None ? 0 : is_local(kind) ? layer2_size : 1) { }

ErrorBounds BoundsAccumulator::finish() const {
    switch (kind_) {
        case BoundKind::None: return {};
        case BoundKind::GlobalAbsolute: return ErrorBounds::global_absolute(std::max(slacks_[0].below, slacks_[0].above));
        case BoundKind::GlobalIndividual: return ErrorBounds::global_individual(slacks_[0]);
        case BoundKind::LocalAbsolute: {
            std::vector<std::uint64_t> errs(slacks_.size());
            for (std::size_t i = 0; i != slacks_.size(); ++i) errs[i] = std::max(slacks_[i].below, slacks_[i].above);
            return ErrorBounds::local_absolute(std::move(errs));
        }
        case BoundKind::LocalIndividual: return ErrorBounds::local_individual(slacks_);
    }
    return {};
}

std::vector<Segment> segment_boundaries(const Model &root, std::span<const Key> keys, std::size_t q, TargetSpace space) {
    if (q == 0) throw std::invalid_argument("segment_boundaries: q must be positive");
    const std::size_t n = keys.size();

    std::vector<Segment> segments(q, Segment{n, n});
    std::size_t current = 0;
    segments[0].begin = 0;
    std::size_t index = 0;
    for (std::size_t i = 0; i != n; ++i) {
        if (i == 0 || keys[i] != keys[i - 1]) {
            index = space == TargetSpace::Position ? get_model_index(keys[i], root, q, n)
                                                   : segment_index(eval_model(root, keys[i]), q);
        }
        if (index < current)
            throw InvariantError("segment_boundaries: root model is not monotone (key at position " + std::to_string(i)
                                 + " maps to segment " + std::to_string(index) + " after segment " + std::to_string(current) + ")");
        while (current < index) {
            segments[current].end = i;
            ++current;
            segments[current].begin = i;
        }
    }
    segments[current].end = n;
    return segments;
}

Rmi::Rmi(RmiConfig config, std::size_t n, Model root, std::vector<LinearModel> leaves, ErrorBounds bounds)
    : config_(config), n_(n), root_(std::move(root)), leaves_(std::move(leaves)), bounds_(std::move(bounds)) { }

Rmi Rmi::from_parts(RmiConfig config, std::size_t n, Model root, std::vector<LinearModel> leaves, ErrorBounds bounds) {
    config.validate();
    if (n == 0) throw std::invalid_argument("Rmi: key count must be positive");
    if (leaves.size() != config.layer2_size) throw std::invalid_argument("Rmi: leaf count differs from layer2_size");
    if (!root_matches(config.root, root)) throw std::invalid_argument("Rmi: root model does not match configured type");
    if (bounds.kind() != config.bounds) throw std::invalid_argument("Rmi: bounds do not match configured kind");
    const std::size_t expected = is_local(bounds.kind()) ? config.layer2_size : 1;
    switch (bounds.kind()) {
        case BoundKind::None: break;
        case BoundKind::GlobalAbsolute:
        case BoundKind::LocalAbsolute:
            if (bounds.absolute().size() != expected) throw std::invalid_argument("Rmi: wrong number of bound entries");
            break;
        case BoundKind::GlobalIndividual:
        case BoundKind::LocalIndividual:
            if (bounds.individual().size() != expected) throw std::invalid_argument("Rmi: wrong number of bound entries");
            break;
    }
    return Rmi(config, n, std::move(root), std::move(leaves), std::move(bounds));
}

std::size_t rmi_size_bytes(const RmiConfig &config) {
    return model_bytes(config.root) + config.layer2_size * model_bytes(config.leaf) + bound_bytes(config.bounds, config.layer2_size);
}

std::size_t Rmi::size_bytes() const noexcept { return rmi_size_bytes(config_); }

Rmi Rmi::with_bounds(const KeySet &ks, BoundKind kind) const {
    Rmi copy = *this;
    copy.bounds_ = compute_bounds(*this, ks, kind);
    copy.config_.bounds = kind;
    return copy;
}

ErrorBounds compute_bounds(const Rmi &r, const KeySet &ks, BoundKind kind) {
    if (ks.size() != r.n()) throw std::invalid_argument("compute_bounds: key set differs from the indexed one");
    BoundsAccumulator acc(kind, r.leaves().size());
    if (kind == BoundKind::None) return acc.finish();
    const auto keys = ks.keys();
    std::size_t position = 0;
    std::size_t leaf = 0;
    std::size_t est = 0;
    for (std::size_t i = 0; i != keys.size(); ++i) {
        if (i == 0 || keys[i] != keys[i - 1]) {
            position = i;
            leaf = r.leaf_index(keys[i]);
            est = r.estimate(keys[i], leaf);
        }
        acc.add(leaf, est, position);
    }
    return acc.finish();
}

Rmi build_rmi(const KeySet &ks, const RmiConfig &config) {
    config.validate();
    const auto keys = ks.keys();
    const std::size_t n = keys.size();
    const std::size_t q = config.layer2_size;

    // Layer 0: the root learns key -> position * q / n, i.e. the leaf index.
    Model root = config.root == ModelType::Radix
                     ? Model(train_radix(keys, q))
                     : train_model(config.root, PositionPairs(keys, 0, static_cast<double>(q) / static_cast<double>(n)));

    // Layer 1: each leaf learns key -> position over its own segment of the sorted array.
    const std::vector<Segment> segments = segment_boundaries(root, keys, q);
    std::vector<LinearModel> leaves(q);
    for (std::size_t j = 0; j != q; ++j) {
        const Segment seg = segments[j];
        if (seg.size() == 0) {
            leaves[j] = LinearModel{0.0, static_cast<double>(seg.begin)};
            continue;
        }
        const PositionPairs pairs(keys.subspan(seg.begin, seg.size()), seg.begin);
        leaves[j] = config.leaf == ModelType::LinearRegression ? train_linear_regression(pairs) : train_linear_spline(pairs);
    }

    RmiConfig unbounded = config;
    unbounded.bounds = BoundKind::None;
    Rmi r = Rmi::from_parts(unbounded, n, std::move(root), std::move(leaves), {});
    if (config.bounds == BoundKind::None) return r;
    return r.with_bounds(ks, config.bounds);
}

std::vector<std::uint8_t> serialize_rmi(const Rmi &r) {
    ByteWriter w;
    w.raw(magic);
    w.u8(rmi_format_version);
    const RmiConfig &cfg = r.config();
    w.u8(static_cast<std::uint8_t>(cfg.root));
    w.u8(static_cast<std::uint8_t>(cfg.leaf));
    w.u8(static_cast<std::uint8_t>(cfg.bounds));
    w.u64(cfg.layer2_size);
    w.u64(r.n());

    if (const auto *lin = std::get_if<LinearModel>(&r.root())) {
        w.f64(lin->slope);
        w.f64(lin->intercept);
    } else if (const auto *cub = std::get_if<CubicModel>(&r.root())) {
        w.f64(cub->a);
        w.f64(cub->b);
        w.f64(cub->c);
        w.f64(cub->d);
        w.u64(cub->origin);
    } else {
        const auto &rx = std::get<RadixModel>(r.root());
        w.u8(rx.left_shift);
        w.u8(rx.right_shift);
    }

    for (const LinearModel &leaf : r.leaves()) {
        w.f64(leaf.slope);
        w.f64(leaf.intercept);
    }

    for (std::uint64_t e : r.bounds().absolute()) w.u64(e);
    for (const Slack &s : r.bounds().individual()) {
        w.u64(s.below);
        w.u64(s.above);
    }
    return w.take();
}

Rmi deserialize_rmi(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    if (!in.match(magic)) throw FormatError("index: bad magic bytes");
    const std::uint8_t version = in.u8();
    if (version != rmi_format_version)
        throw FormatError("index: unsupported format version " + std::to_string(version));

    RmiConfig cfg;
    cfg.root = checked_model_type(in.u8());
    cfg.leaf = checked_model_type(in.u8());
    cfg.bounds = checked_bound_kind(in.u8());
    cfg.layer2_size = in.u64();
    try {
        cfg.validate();
    } catch (const std::invalid_argument &e) {
        throw FormatError(std::string("index: ") + e.what());
    }
    const std::uint64_t n = in.u64();
    if (n == 0) throw FormatError("index: key count must be positive");

    Model root;
    switch (cfg.root) {
        case ModelType::LinearRegression:
        case ModelType::LinearSpline: {
            LinearModel lin;
            lin.slope = in.f64();
            lin.intercept = in.f64();
            root = lin;
            break;
        }
        case ModelType::CubicSpline: {
            CubicModel cub;
            cub.a = in.f64();
            cub.b = in.f64();
            cub.c = in.f64();
            cub.d = in.f64();
            cub.origin = in.u64();
            root = cub;
            break;
        }
        case ModelType::Radix: {
            RadixModel rx;
            rx.left_shift = in.u8();
            rx.right_shift = in.u8();
            if (rx.left_shift > 64 || rx.right_shift > 64) throw FormatError("index: radix shift out of range");
            root = rx;
            break;
        }
    }

    const std::size_t q = cfg.layer2_size;
    if (in.remaining() / 16 < q) throw FormatError("index: truncated byte stream");
    std::vector<LinearModel> leaves(q);
    for (auto &leaf : leaves) {
        leaf.slope = in.f64();
        leaf.intercept = in.f64();
    }

    ErrorBounds bounds;
    const std::size_t entries = is_local(cfg.bounds) ? q : 1;
    switch (cfg.bounds) {
        case BoundKind::None: break;
        case BoundKind::GlobalAbsolute:
        case BoundKind::LocalAbsolute: {
            if (in.remaining() / 8 < entries) throw FormatError("index: truncated byte stream");
            std::vector<std::uint64_t> errs(entries);
            for (auto &e : errs) e = in.u64();
            bounds = cfg.bounds == BoundKind::GlobalAbsolute ? ErrorBounds::global_absolute(errs[0])
                                                             : ErrorBounds::local_absolute(std::move(errs));
            break;
        }
        case BoundKind::GlobalIndividual:
        case BoundKind::LocalIndividual: {
            if (in.remaining() / 16 < entries) throw FormatError("index: truncated byte stream");
            std::vector<Slack> slacks(entries);
            for (auto &s : slacks) {
                s.below = in.u64();
                s.above = in.u64();
            }
            bounds = cfg.bounds == BoundKind::GlobalIndividual ? ErrorBounds::global_individual(slacks[0])
                                                               : ErrorBounds::local_individual(std::move(slacks));
            break;
        }
    }
    if (in.remaining() != 0) throw FormatError("index: trailing bytes after bounds block");
    return Rmi::from_parts(cfg, n, std::move(root), std::move(leaves), std::move(bounds));
}

void save_rmi(const Rmi &r, const std::filesystem::path &path) {
    const auto bytes = serialize_rmi(r);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open index file for writing: " + path.string());
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out.flush()) throw IoError("failed writing index file: " + path.string());
}

Rmi load_rmi(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open index file: " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_rmi(bytes);
}

} // namespace rmi
