#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace dnas {

using Rng = std::mt19937_64;

enum class Color : std::uint8_t { monochrome, rgb };

inline constexpr std::array<int, 7> kResolutions{32, 64, 96, 128, 160, 192, 224};
inline constexpr std::array<Color, 2> kColors{Color::monochrome, Color::rgb};

/// Number of searched stages (stages 3..7).
inline constexpr std::size_t kSearchedStages = 5;
/// Upper bound of blocks per searched stage, stages 3..7.
inline constexpr std::array<int, kSearchedStages> kMaxDepths{3, 4, 3, 3, 1};

std::string_view to_string(Color color);
std::optional<Color> parse_color(std::string_view text);

/// Number of input channels implied by the color encoding.
constexpr int channel_count(Color color) { return color == Color::rgb ? 3 : 1; }

/// Width multiplier stored as an integer number of tenths, so 0.3 is exactly 3.
class Alpha {
public:
    static constexpr int kMinTenths = 1;
    static constexpr int kMaxTenths = 10;

    constexpr Alpha() = default;
    constexpr explicit Alpha(int tenths) : tenths_(tenths) {}

    /// Nearest tenth of `value`; nullopt if `value` is not within 1e-9 of a tenth.
    static std::optional<Alpha> from_double(double value);

    constexpr int tenths() const { return tenths_; }
    constexpr double value() const { return tenths_ / 10.0; }
    constexpr bool valid() const { return tenths_ >= kMinTenths && tenths_ <= kMaxTenths; }

    friend constexpr auto operator<=>(Alpha, Alpha) = default;

private:
    int tenths_ = kMaxTenths;
};

struct DataConfig {
    int resolution = 224;
    Color color = Color::rgb;

    friend constexpr auto operator<=>(const DataConfig&, const DataConfig&) = default;
};

using Depths = std::array<int, kSearchedStages>;

struct ModelConfig {
    Depths depths{3, 4, 3, 3, 1};
    Alpha alpha{};

    friend constexpr bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// One point of the joint data + model search space.
struct Candidate {
    DataConfig data;
    ModelConfig model;
    std::uint64_t id = 0;

    // Identity is the genome; the id is bookkeeping.
    friend constexpr bool operator==(const Candidate& a, const Candidate& b) {
        return a.data == b.data && a.model == b.model;
    }
};

/// Width multiplier after the monochrome reduction: alpha for rgb, (2/3) alpha for monochrome.
double effective_alpha(Color color, Alpha alpha);

std::string to_string(const DataConfig& dc);
std::string to_string(const Candidate& c);

/// Returns nullopt if the candidate lies in the search space, else a description of the first broken rule.
std::optional<std::string> validate(const Candidate& candidate);
std::optional<std::string> validate(const DataConfig& data);
std::optional<std::string> validate(const ModelConfig& model);

/// Zeroes every depth after the first removed stage.
Depths repair_depths(Depths depths);

/// Data genes pinned to fixed values (hardware-aware mode freezes both).
struct GeneLocks {
    std::optional<int> resolution;
    std::optional<Color> color;

    bool frozen_data() const { return resolution.has_value() && color.has_value(); }
    friend bool operator==(const GeneLocks&, const GeneLocks&) = default;
};

/// Index of the last non-empty stage: 2 when stages 3..7 are all removed, up to 7.
int truncation_point(const Depths& depths);

/// Samples a valid candidate. The truncation point is drawn first, uniformly over {2..7},
/// then every kept stage gets a depth uniform in {1..max}.
Candidate random_candidate(Rng& rng, const GeneLocks& locks = {});

/// All |R| x |C| data configurations, resolution ascending, monochrome before rgb.
std::vector<DataConfig> enumerate_data_configs();

/// Position of `resolution` in kResolutions, or -1.
int resolution_index(int resolution);

} // namespace dnas
