#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "mdwtnn/io.hpp"
#include "mdwtnn/report.hpp"
#include "support/oracles.hpp"

using namespace mdwtnn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mdwtnn_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("cube files round trip bitwise for f64", "[io]") {
    TempDir dir;
    PortableRng rng(101);
    Cube x = oracles::random_cube(4, 5, 6, rng, -3.0, 3.0);

    const fs::path p = dir.path / "x.cube";
    save_cube(x, p);
    LoadedCube loaded = load_cube_file(p);
    REQUIRE(loaded.cube.dims == x.dims);
    REQUIRE(loaded.cube.values == x.values);
    REQUIRE(loaded.scalar == ScalarType::f64);
    REQUIRE_FALSE(fs::exists(dir.path / "x.cube.tmp")); // write-then-rename
}

TEST_CASE("f32 payloads widen exactly", "[io]") {
    TempDir dir;
    PortableRng rng(102);
    Cube x = oracles::random_cube(3, 3, 2, rng);
    const fs::path p = dir.path / "x32.cube";
    save_cube(x, p, ScalarType::f32);
    LoadedCube loaded = load_cube_file(p);
    REQUIRE(loaded.scalar == ScalarType::f32);
    for (std::size_t t = 0; t < x.size(); ++t)
        REQUIRE(loaded.cube.values[t] == static_cast<double>(static_cast<float>(x.values[t])));
}

TEST_CASE("band labels survive the round trip", "[io]") {
    TempDir dir;
    Cube x(2, 2, 3);
    const fs::path p = dir.path / "lab.cube";
    save_cube(x, p, ScalarType::f64, {"450nm", "550nm", "650nm"});
    LoadedCube loaded = load_cube_file(p);
    REQUIRE(loaded.band_labels == std::vector<std::string>{"450nm", "550nm", "650nm"});
}

TEST_CASE("cube file error paths are distinct", "[io]") {
    TempDir dir;
    Cube x(2, 2, 2);
    const fs::path good = dir.path / "good.cube";
    save_cube(x, good);

    SECTION("truncated payload names the byte counts") {
        std::string bytes = detail::read_all(good);
        bytes.resize(bytes.size() - 5);
        detail::atomic_write(dir.path / "trunc.cube", bytes);
        try {
            load_cube(dir.path / "trunc.cube");
            FAIL("expected CubeFileError");
        } catch (const CubeFileError& e) {
            REQUIRE(e.reason == CubeFileError::Reason::truncated_payload);
            REQUIRE(std::string(e.what()).find("59") != std::string::npos); // actual
            REQUIRE(std::string(e.what()).find("64") != std::string::npos); // expected
        }
    }
    SECTION("malformed header") {
        detail::atomic_write(dir.path / "bad.cube", "NOTACUBE\n");
        try {
            load_cube(dir.path / "bad.cube");
            FAIL("expected CubeFileError");
        } catch (const CubeFileError& e) {
            REQUIRE(e.reason == CubeFileError::Reason::malformed_header);
        }
        detail::atomic_write(dir.path / "bad2.cube",
                             "MDWCUBE 1\ndims 2 2\nscalar f64\nend\n");
        REQUIRE_THROWS_AS(load_cube(dir.path / "bad2.cube"), CubeFileError);
    }
    SECTION("dim overflow") {
        detail::atomic_write(dir.path / "huge.cube",
                             "MDWCUBE 1\ndims 99999999999 99999999999 2\nscalar f64\nend\n");
        try {
            load_cube(dir.path / "huge.cube");
            FAIL("expected CubeFileError");
        } catch (const CubeFileError& e) {
            REQUIRE(e.reason == CubeFileError::Reason::dim_overflow);
        }
    }
    SECTION("missing file") { REQUIRE_THROWS_AS(load_cube(dir.path / "nope.cube"), IoError); }
}

TEST_CASE("band export writes 16-bit pgm plus scale sidecar", "[io]") {
    TempDir dir;
    PortableRng rng(103);
    Cube x = oracles::random_cube(7, 9, 2, rng, 0.2, 0.8);

    SECTION("round trip within one quantization step") {
        const fs::path p = dir.path / "band.pgm";
        export_band(x, 1, p);
        const std::string bytes = detail::read_all(p);
        REQUIRE(bytes.rfind("P5\n9 7\n65535\n", 0) == 0);

        // parse sidecar
        std::ifstream side(dir.path / "band.pgm.scale.txt");
        std::string key;
        double lo, hi;
        int degenerate;
        side >> key >> lo >> key >> hi >> key >> degenerate;
        REQUIRE(degenerate == 0);

        const std::size_t header_len = std::string("P5\n9 7\n65535\n").size();
        const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data()) + header_len;
        const double step = (hi - lo) / 65535.0;
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 9; ++j) {
                const std::size_t off = 2 * (i * 9 + j);
                const std::uint16_t q = static_cast<std::uint16_t>((raster[off] << 8) |
                                                                   raster[off + 1]);
                const double rebuilt = lo + q * step;
                REQUIRE_THAT(rebuilt, Catch::Matchers::WithinAbs(x(i, j, 1), step));
            }
    }
    SECTION("values 0/1 map to the full range") {
        Cube b(2, 2, 1);
        b(0, 0, 0) = 1.0;
        b(1, 1, 0) = 1.0;
        const fs::path p = dir.path / "binary.pgm";
        export_band(b, 0, p);
        const std::string bytes = detail::read_all(p);
        const std::size_t off = std::string("P5\n2 2\n65535\n").size();
        const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data()) + off;
        // row-major: (0,0) (0,1) (1,0) (1,1)
        const std::uint16_t vals[4] = {
            static_cast<std::uint16_t>((raster[0] << 8) | raster[1]),
            static_cast<std::uint16_t>((raster[2] << 8) | raster[3]),
            static_cast<std::uint16_t>((raster[4] << 8) | raster[5]),
            static_cast<std::uint16_t>((raster[6] << 8) | raster[7]),
        };
        REQUIRE(vals[0] == 65535);
        REQUIRE(vals[1] == 0);
        REQUIRE(vals[2] == 0);
        REQUIRE(vals[3] == 65535);
    }
    SECTION("constant band is flagged degenerate") {
        Cube c(3, 3, 1);
        for (auto& v : c.values) v = 0.4;
        export_band(c, 0, dir.path / "const.pgm");
        std::ifstream side(dir.path / "const.pgm.scale.txt");
        std::string key;
        double lo, hi;
        int degenerate;
        side >> key >> lo >> key >> hi >> key >> degenerate;
        REQUIRE(degenerate == 1);
    }
    SECTION("out-of-range band index") {
        REQUIRE_THROWS_AS(export_band(x, 2, dir.path / "oob.pgm"), UsageError);
    }
}

TEST_CASE("report csv schema and parse-back", "[io]") {
    TempDir dir;
    PortableRng rng(104);
    Cube ref = oracles::random_cube(16, 16, 4, rng, 0.05, 0.95);
    Cube test = ref;
    for (auto& v : test.values) v += rng.uniform(-0.05, 0.05);
    QualityReport r = evaluate(ref, test);
    r.wall_time_seconds = 1.25;

    const fs::path p = dir.path / "report.csv";
    write_report_csv(r, p);

    const std::string text = detail::read_all(p);
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    REQUIRE(lines == 1 + 4 + 1); // header + bands + summary

    ParsedReport parsed = parse_report_csv(p);
    REQUIRE(parsed.psnr_per_band == r.psnr_per_band);
    REQUIRE(parsed.ssim_per_band == r.ssim_per_band);
    REQUIRE(parsed.mpsnr == r.mpsnr);
    REQUIRE(parsed.mssim == r.mssim);
    REQUIRE(parsed.msam == r.msam);
    REQUIRE(parsed.time_s == 1.25);
}

TEST_CASE("identical cubes report the capped summary", "[io]") {
    TempDir dir;
    PortableRng rng(105);
    Cube ref = oracles::random_cube(16, 16, 3, rng, 0.1, 0.9);
    QualityReport r = evaluate(ref, ref);
    const fs::path p = dir.path / "self.csv";
    write_report_csv(r, p);
    ParsedReport parsed = parse_report_csv(p);
    REQUIRE(parsed.mpsnr == 100.0);
    REQUIRE(parsed.mssim == 1.0);
    REQUIRE_THAT(parsed.msam, Catch::Matchers::WithinAbs(0.0, 1e-10));
}

TEST_CASE("run snapshot embeds the effective config and exit weights", "[io]") {
    PortableRng rng(106);
    Cube y = oracles::low_rank_unit_cube(8, 8, 4, 2, rng);
    SolverConfig cfg;
    cfg.max_iter = 3;
    DenoiseResult result = denoise(y, cfg);

    nlohmann::json snap = run_snapshot(result);
    REQUIRE(snap["config"]["lambda_effective"].get<double>() ==
            cfg.resolve_lambda(y.dims));
    REQUIRE(snap["config"]["tau"].get<double>() == 10.0);
    REQUIRE(snap["config"]["max_iter"].get<int>() == 3);
    REQUIRE(snap["iterations"].get<int>() == 3);
    REQUIRE(snap["weights_at_exit"]["mode3"]["freq"].size() == 4);
    REQUIRE(snap["weights_at_exit"]["mode1"]["trunc"].size() == 8);
    REQUIRE(snap["wall_seconds"].get<double>() == 0.0); // timing off by default

    TempDir dir;
    write_json(snap, dir.path / "snap.json");
    const std::string text = detail::read_all(dir.path / "snap.json");
    REQUIRE(nlohmann::json::parse(text) == snap);
}

TEST_CASE("iteration log schema", "[io]") {
    TempDir dir;
    std::vector<IterationRecord> history(2);
    history[0].iter = 1;
    history[0].constraint_rel = 0.5;
    history[0].z_gap_rel = 0.25;
    history[1].iter = 2;
    history[1].constraint_rel = 0.1;
    history[1].z_gap_rel = 0.05;
    write_iteration_log(history, dir.path / "log.csv");
    const std::string text = detail::read_all(dir.path / "log.csv");
    REQUIRE(text == "iter,constraint_rel,z_gap_rel,z_s,x_s,s_s,n_s,mult_s\n"
                    "1,0.5,0.25,0,0,0,0,0\n"
                    "2,0.1,0.050000000000000003,0,0,0,0,0\n");
}
