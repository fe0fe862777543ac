#include "motkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string_view>

#include "motkit/errors.hpp"

namespace motkit {

namespace {

std::string where(const std::string& path, int line) {
    return path + ":" + std::to_string(line);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_real(std::string_view raw, const std::string& path, int line, int column) {
    const std::string_view s = trim(raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError(where(path, line) + ": field " + std::to_string(column) +
                         " is not a number: '" + std::string(raw) + "'");
    }
    return value;
}

int parse_integer(std::string_view raw, const std::string& path, int line, int column) {
    const double v = parse_real(raw, path, line, column);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw ParseError(where(path, line) + ": field " + std::to_string(column) +
                         " must be an integer: '" + std::string(raw) + "'");
    }
    return i;
}

// Calls `row(fields, line_number)` for every non-blank line.
template <typename RowFn>
void for_each_row(const std::string& path, RowFn&& row) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open for reading: " + path);
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        row(split_fields(line), line_number);
    }
}

void require_fields(const std::vector<std::string_view>& fields, std::size_t needed,
                    const std::string& path, int line) {
    if (fields.size() < needed) {
        throw ParseError(where(path, line) + ": expected at least " + std::to_string(needed) +
                         " fields, got " + std::to_string(fields.size()));
    }
}

struct MotRow {
    int frame;
    int id;
    Box2D box;
    double conf;
    int class_id;
    double visibility;
};

MotRow parse_mot_row(const std::vector<std::string_view>& fields, const std::string& path,
                     int line) {
    require_fields(fields, 7, path, line);
    MotRow row;
    row.frame = parse_integer(fields[0], path, line, 1);
    row.id = parse_integer(fields[1], path, line, 2);
    row.box.x = parse_real(fields[2], path, line, 3);
    row.box.y = parse_real(fields[3], path, line, 4);
    row.box.w = parse_real(fields[4], path, line, 5);
    row.box.h = parse_real(fields[5], path, line, 6);
    row.conf = parse_real(fields[6], path, line, 7);
    row.class_id = fields.size() > 7 ? parse_integer(fields[7], path, line, 8) : 1;
    row.visibility = fields.size() > 8 ? parse_real(fields[8], path, line, 9) : 1.0;
    if (row.frame < 1) {
        throw ParseError(where(path, line) + ": frame must be >= 1");
    }
    if (row.box.w < 0 || row.box.h < 0) {
        throw NegativeDimensions(where(path, line) + ": negative box size " +
                                 std::to_string(row.box.w) + "x" + std::to_string(row.box.h));
    }
    return row;
}

class LineWriter {
public:
    explicit LineWriter(const std::string& path) : path_(path), out_(path) {
        if (!out_) throw IoFailure("cannot open for writing: " + path);
    }
    void printf(const char* fmt, auto arg0, auto... args) {
        char buf[512];
        std::snprintf(buf, sizeof(buf), fmt, arg0, args...);
        out_ << buf;
    }
    void printf(const char* text) { out_ << text; }
    // Must be called once after the last write; detects disk-level failures.
    void close() {
        out_.flush();
        if (!out_) throw IoFailure("write failed: " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
};

}  // namespace

std::vector<GtEntry> read_gt_file(const std::string& path) {
    std::vector<GtEntry> entries;
    for_each_row(path, [&](const std::vector<std::string_view>& fields, int line) {
        const MotRow row = parse_mot_row(fields, path, line);
        if (row.id < 1) {
            throw ParseError(where(path, line) + ": ground-truth id must be positive");
        }
        entries.push_back({row.frame, row.id, row.box, row.visibility});
    });
    std::stable_sort(entries.begin(), entries.end(), [](const GtEntry& a, const GtEntry& b) {
        return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
    });
    return entries;
}

std::vector<DetectionObservation> read_detections_file(const std::string& path) {
    std::vector<DetectionObservation> entries;
    for_each_row(path, [&](const std::vector<std::string_view>& fields, int line) {
        const MotRow row = parse_mot_row(fields, path, line);
        DetectionObservation det;
        det.frame = row.frame;
        det.box = row.box;
        det.confidence = row.conf;
        det.class_id = row.class_id;
        entries.push_back(std::move(det));
    });
    // Stable by frame: the within-frame file order is the detection index.
    std::stable_sort(entries.begin(), entries.end(),
                     [](const DetectionObservation& a, const DetectionObservation& b) {
                         return a.frame < b.frame;
                     });
    return entries;
}

std::vector<ResultEntry> read_result_file(const std::string& path) {
    std::vector<ResultEntry> entries;
    for_each_row(path, [&](const std::vector<std::string_view>& fields, int line) {
        const MotRow row = parse_mot_row(fields, path, line);
        if (row.id < 1) {
            throw ParseError(where(path, line) + ": result id must be positive");
        }
        entries.push_back({row.frame, row.id, row.box, row.conf});
    });
    std::stable_sort(entries.begin(), entries.end(), [](const ResultEntry& a, const ResultEntry& b) {
        return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
    });
    return entries;
}

EmbeddingTable read_embeddings_file(const std::string& path) {
    EmbeddingTable table;
    Eigen::Index dim = -1;
    for_each_row(path, [&](const std::vector<std::string_view>& fields, int line) {
        require_fields(fields, 3, path, line);
        const int frame = parse_integer(fields[0], path, line, 1);
        const int det_index = parse_integer(fields[1], path, line, 2);
        if (frame < 1) throw ParseError(where(path, line) + ": frame must be >= 1");
        if (det_index < 0) throw ParseError(where(path, line) + ": det_index must be >= 0");
        const Eigen::Index d = static_cast<Eigen::Index>(fields.size()) - 2;
        if (dim < 0) {
            dim = d;
        } else if (d != dim) {
            throw InconsistentDimension(where(path, line) + ": embedding has " +
                                        std::to_string(d) + " components, expected " +
                                        std::to_string(dim));
        }
        EmbeddingVector v(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            v(k) = parse_real(fields[static_cast<std::size_t>(k) + 2], path, line,
                              static_cast<int>(k) + 3);
        }
        const double norm = v.norm();
        if (norm == 0.0) {
            throw ZeroVector(where(path, line) + ": embedding row has zero norm");
        }
        table[frame].emplace_back(det_index, v / norm);
    });
    return table;
}

void write_results_file(const std::string& path, const std::vector<FrameResult>& results) {
    std::vector<std::pair<int, TrackOutput>> rows;
    for (const FrameResult& fr : results) {
        for (const TrackOutput& out : fr.outputs) rows.emplace_back(fr.frame, out);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second.track_id < b.second.track_id;
    });
    LineWriter out(path);
    for (const auto& [frame, r] : rows) {
        out.printf("%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,-1,-1,-1\n", frame, r.track_id, r.box.x,
                   r.box.y, r.box.w, r.box.h, r.confidence);
    }
    out.close();
}

std::vector<FrameResult> group_results(const std::vector<ResultEntry>& entries) {
    std::map<int, std::vector<TrackOutput>> by_frame;
    for (const ResultEntry& e : entries) {
        by_frame[e.frame].push_back({e.id, e.box, e.confidence, 1});
    }
    std::vector<FrameResult> results;
    for (auto& [frame, outputs] : by_frame) {
        std::sort(outputs.begin(), outputs.end(),
                  [](const TrackOutput& a, const TrackOutput& b) {
                      return a.track_id < b.track_id;
                  });
        results.push_back({frame, std::move(outputs)});
    }
    return results;
}

std::map<int, AffineTransform2D> read_transforms_file(const std::string& path) {
    std::map<int, AffineTransform2D> transforms;
    for_each_row(path, [&](const std::vector<std::string_view>& fields, int line) {
        require_fields(fields, 7, path, line);
        const int frame = parse_integer(fields[0], path, line, 1);
        if (frame < 1) throw ParseError(where(path, line) + ": frame must be >= 1");
        AffineTransform2D T;
        T.m(0, 0) = parse_real(fields[1], path, line, 2);
        T.m(0, 1) = parse_real(fields[2], path, line, 3);
        T.m(1, 0) = parse_real(fields[3], path, line, 4);
        T.m(1, 1) = parse_real(fields[4], path, line, 5);
        T.t(0) = parse_real(fields[5], path, line, 6);
        T.t(1) = parse_real(fields[6], path, line, 7);
        if (!transforms.emplace(frame, T).second) {
            throw ParseError(where(path, line) + ": duplicate transform for frame " +
                             std::to_string(frame));
        }
    });
    return transforms;
}

void write_transforms_file(const std::string& path,
                           const std::map<int, AffineTransform2D>& transforms) {
    LineWriter out(path);
    for (const auto& [frame, T] : transforms) {
        out.printf("%d,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f\n", frame, T.m(0, 0), T.m(0, 1), T.m(1, 0),
                   T.m(1, 1), T.t(0), T.t(1));
    }
    out.close();
}

std::vector<PointCorrespondenceSet> read_correspondences_file(const std::string& path) {
    std::map<int, PointCorrespondenceSet> by_frame;
    for_each_row(path, [&](const std::vector<std::string_view>& fields, int line) {
        require_fields(fields, 5, path, line);
        const int frame = parse_integer(fields[0], path, line, 1);
        if (frame < 1) throw ParseError(where(path, line) + ": frame must be >= 1");
        Point2D source{parse_real(fields[1], path, line, 2), parse_real(fields[2], path, line, 3)};
        Point2D target{parse_real(fields[3], path, line, 4), parse_real(fields[4], path, line, 5)};
        PointCorrespondenceSet& set = by_frame[frame];
        set.frame_index = frame;
        set.pairs.emplace_back(source, target);
    });
    std::vector<PointCorrespondenceSet> sets;
    for (auto& [frame, set] : by_frame) sets.push_back(std::move(set));
    return sets;
}

void write_correspondences_file(const std::string& path,
                                const std::vector<PointCorrespondenceSet>& sets) {
    LineWriter out(path);
    for (const PointCorrespondenceSet& set : sets) {
        for (const auto& [s, t] : set.pairs) {
            out.printf("%d,%.9f,%.9f,%.9f,%.9f\n", set.frame_index, s.x, s.y, t.x, t.y);
        }
    }
    out.close();
}

void write_gt_file(const std::string& path, const std::vector<GtEntry>& entries) {
    LineWriter out(path);
    for (const GtEntry& e : entries) {
        out.printf("%d,%d,%.6f,%.6f,%.6f,%.6f,1,1,%.6f\n", e.frame, e.id, e.box.x, e.box.y,
                   e.box.w, e.box.h, e.visibility);
    }
    out.close();
}

void write_detections_file(const std::string& path,
                           const std::vector<DetectionObservation>& detections) {
    LineWriter out(path);
    for (const DetectionObservation& d : detections) {
        out.printf("%d,-1,%.6f,%.6f,%.6f,%.6f,%.6f,%d,-1\n", d.frame, d.box.x, d.box.y, d.box.w,
                   d.box.h, d.confidence, d.class_id);
    }
    out.close();
}

void write_embeddings_file(const std::string& path,
                           const std::vector<DetectionObservation>& detections,
                           double high_conf_threshold) {
    LineWriter out(path);
    int current_frame = -1;
    int index_in_frame = 0;
    for (const DetectionObservation& d : detections) {
        if (d.frame != current_frame) {
            current_frame = d.frame;
            index_in_frame = 0;
        }
        if (d.confidence >= high_conf_threshold && d.embedding.has_value()) {
            out.printf("%d,%d", d.frame, index_in_frame);
            for (Eigen::Index k = 0; k < d.embedding->size(); ++k) {
                out.printf(",%.9f", (*d.embedding)(k));
            }
            out.printf("\n");
        }
        ++index_in_frame;
    }
    out.close();
}

void write_bundle(const std::string& directory, const ScenarioBundle& bundle,
                  double high_conf_threshold) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw IoFailure("cannot create directory " + directory + ": " + ec.message());
    const std::filesystem::path dir(directory);
    write_gt_file((dir / "gt.txt").string(), bundle.gt);
    write_detections_file((dir / "det.txt").string(), bundle.detections);
    write_embeddings_file((dir / "emb.txt").string(), bundle.detections, high_conf_threshold);
    write_transforms_file((dir / "transforms.txt").string(), bundle.transforms);
    write_correspondences_file((dir / "corresp.txt").string(), bundle.correspondences);
}

}  // namespace motkit
