#include "uwoam/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace uwoam {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> frame_intensity(const Frame& frame) {
    std::vector<double> img(frame.counts.size());
    for (size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(frame.counts[i]);
    return img;
}

// One 3x3 box pass with clamped borders.
std::vector<double> box3(const std::vector<double>& img, int n) {
    std::vector<double> out(img.size());
    auto clamp = [n](int v) { return std::clamp(v, 0, n - 1); };
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            double s = 0.0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    s += img[static_cast<size_t>(clamp(y + dy)) * n + clamp(x + dx)];
            out[static_cast<size_t>(y) * n + x] = s / 9.0;
        }
    return out;
}

std::vector<double> smooth2(const std::vector<double>& img, int n) { return box3(box3(img, n), n); }

struct Component {
    std::vector<int> pixels;  // linear indices
};

// 8-connected components of mask, BFS.
std::vector<Component> connected_components(const std::vector<char>& mask, int n) {
    std::vector<Component> comps;
    std::vector<char> seen(mask.size(), 0);
    for (size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || seen[start]) continue;
        Component c;
        std::queue<int> q;
        q.push(static_cast<int>(start));
        seen[start] = 1;
        while (!q.empty()) {
            const int idx = q.front();
            q.pop();
            c.pixels.push_back(idx);
            const int x = idx % n, y = idx / n;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= n || ny >= n) continue;
                    const int nidx = ny * n + nx;
                    if (mask[nidx] && !seen[nidx]) {
                        seen[nidx] = 1;
                        q.push(nidx);
                    }
                }
        }
        comps.push_back(std::move(c));
    }
    return comps;
}

double wrap_pm_pi(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

}  // namespace

PetalSet segment_petals(const Frame& frame, int ell, double threshold_fraction) {
    if (ell < 1) throw std::invalid_argument("segment_petals: ell must be >= 1");
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw std::invalid_argument("segment_petals: threshold_fraction must be in (0,1)");

    PetalSet petals;
    petals.ell = ell;
    if (frame.counts.empty()) return petals;

    const int n = frame.pixels;
    const std::vector<double> img = smooth2(frame_intensity(frame), n);
    const double peak = *std::max_element(img.begin(), img.end());
    if (!(peak > 0.0)) return petals;

    const double thresh = threshold_fraction * peak;
    std::vector<char> mask(img.size());
    for (size_t i = 0; i < img.size(); ++i) mask[i] = img[i] >= thresh;

    std::vector<Component> comps = connected_components(mask, n);
    petals.found_count = static_cast<int>(comps.size());
    if (petals.found_count < 2 * ell) return petals;

    std::sort(comps.begin(), comps.end(),
              [](const Component& a, const Component& b) { return a.pixels.size() > b.pixels.size(); });
    comps.resize(2 * ell);

    double ux = 0.0, uy = 0.0, uw = 0.0;
    for (const Component& c : comps) {
        double cx = 0.0, cy = 0.0, w = 0.0;
        for (int idx : c.pixels) {
            const double v = img[idx];
            cx += v * (idx % n);
            cy += v * (idx / n);
            w += v;
        }
        petals.centroids.emplace_back(cx / w, cy / w);
        ux += cx;
        uy += cy;
        uw += w;
    }
    petals.pattern_center = {ux / uw, uy / uw};
    return petals;
}

OrientationResult orientation(const PetalSet& petals) {
    if (!petals.accepted() || petals.centroids.empty())
        throw std::invalid_argument("orientation: petal set was not accepted");
    const int l = petals.ell;
    cplx resultant = 0.0;
    for (const auto& [cx, cy] : petals.centroids) {
        const double beta = std::atan2(cy - petals.pattern_center.second,
                                       cx - petals.pattern_center.first);
        resultant += std::polar(1.0, 2.0 * l * beta);
    }
    OrientationResult r;
    const double period = kPi / l;
    double angle = std::arg(resultant) / (2.0 * l);
    angle = std::fmod(angle, period);
    if (angle < 0.0) angle += period;
    if (period - angle < 1e-9) angle = 0.0;  // snap the fold seam
    r.angle = angle;
    r.theta = wrap_2pi(-2.0 * l * angle);
    r.quality = std::abs(resultant) / static_cast<double>(petals.centroids.size());
    r.low_confidence = r.quality < 0.5;
    return r;
}

double angle_deviation(double sent_theta, const OrientationResult& result, int ell) {
    const double period = kPi / ell;
    double expected = std::fmod(-sent_theta / (2.0 * ell), period);
    if (expected < 0.0) expected += period;
    double d = std::fmod(std::abs(result.angle - expected), period);
    if (d > period / 2.0) d = period - d;
    return d * 180.0 / kPi;
}

CrosstalkMatrix crosstalk(const std::vector<double>& sent_phases,
                          const std::vector<OrientationResult>& received) {
    if (sent_phases.empty() || received.empty())
        throw std::invalid_argument("crosstalk: empty input");
    CrosstalkMatrix m;
    m.sent_phases = sent_phases;
    for (const OrientationResult& r : received) {
        m.received_phases.push_back(r.theta);
        std::vector<double> row;
        row.reserve(sent_phases.size());
        for (double sent : sent_phases) row.push_back(analytic_fidelity(sent, r.theta));
        m.values.push_back(std::move(row));
    }
    return m;
}

FidelitySeries fidelity_series(const std::vector<Frame>& frames, const SuperpositionSpec& sent) {
    if (frames.size() < 2) throw std::invalid_argument("fidelity_series: need >= 2 frames");
    sent.validate();
    FidelitySeries s;
    double sum = 0.0, sum2 = 0.0;
    int ok = 0;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    for (const Frame& f : frames) {
        PetalSet petals = segment_petals(f, std::abs(sent.ell));
        if (!petals.accepted()) {
            s.values.push_back(std::nullopt);
            ++s.failed;
            continue;
        }
        const OrientationResult r = orientation(petals);
        if (r.low_confidence) {  // petals found but no coherent orientation
            s.values.push_back(std::nullopt);
            ++s.failed;
            continue;
        }
        const double fid = analytic_fidelity(sent.theta, r.theta);
        s.values.push_back(fid);
        sum += fid;
        sum2 += fid * fid;
        s.min = std::min(s.min, fid);
        s.max = std::max(s.max, fid);
        ++ok;
    }
    if (ok == 0) throw std::runtime_error("fidelity_series: every frame failed petal detection");
    s.mean = sum / ok;
    s.stddev = (ok > 1) ? std::sqrt(std::max(0.0, (sum2 - sum * sum / ok) / (ok - 1))) : 0.0;
    return s;
}

std::vector<VortexCore> find_vortices_field(const ComplexField& field, double aperture_radius) {
    const int n = field.grid.n;
    const double pitch = field.grid.pitch();

    // Winding of each 2x2 plaquette (corner (ix,iy) .. (ix+1,iy+1)).
    std::vector<int> winding(static_cast<size_t>(n - 1) * (n - 1), 0);
    std::vector<char> marked(winding.size(), 0);
    for (int iy = 0; iy + 1 < n; ++iy) {
        const double yc = field.grid.coord(iy) + 0.5 * pitch;
        for (int ix = 0; ix + 1 < n; ++ix) {
            const double xc = field.grid.coord(ix) + 0.5 * pitch;
            if (xc * xc + yc * yc > aperture_radius * aperture_radius) continue;
            // Exact nulls have no phase; the ring pass below handles them.
            if (std::norm(field.at(ix, iy)) == 0.0 || std::norm(field.at(ix + 1, iy)) == 0.0 ||
                std::norm(field.at(ix + 1, iy + 1)) == 0.0 || std::norm(field.at(ix, iy + 1)) == 0.0)
                continue;
            const double p00 = std::arg(field.at(ix, iy));
            const double p10 = std::arg(field.at(ix + 1, iy));
            const double p11 = std::arg(field.at(ix + 1, iy + 1));
            const double p01 = std::arg(field.at(ix, iy + 1));
            const double circ = wrap_pm_pi(p10 - p00) + wrap_pm_pi(p11 - p10) +
                                wrap_pm_pi(p01 - p11) + wrap_pm_pi(p00 - p01);
            const int w = static_cast<int>(std::lround(circ / (2.0 * kPi)));
            if (w != 0) {
                const size_t idx = static_cast<size_t>(iy) * (n - 1) + ix;
                winding[idx] = w;
                marked[idx] = 1;
            }
        }
    }

    // A vortex sitting exactly on a sample leaves every surrounding
    // plaquette windingless (the phase of a zero amplitude is undefined),
    // so detect exact nulls by the circulation of their 8-neighbor ring.
    for (int iy = 1; iy + 1 < n; ++iy) {
        const double yc = field.grid.coord(iy);
        for (int ix = 1; ix + 1 < n; ++ix) {
            const double xc = field.grid.coord(ix);
            if (xc * xc + yc * yc > aperture_radius * aperture_radius) continue;
            if (std::norm(field.at(ix, iy)) != 0.0) continue;
            static constexpr int ring[8][2] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                                               {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
            double circ = 0.0;
            bool ok = true;
            double prev = std::arg(field.at(ix + ring[7][0], iy + ring[7][1]));
            for (const auto& [dx, dy] : ring) {
                const cplx a = field.at(ix + dx, iy + dy);
                if (std::norm(a) == 0.0) {
                    ok = false;
                    break;
                }
                const double p = std::arg(a);
                circ += wrap_pm_pi(p - prev);
                prev = p;
            }
            if (!ok) continue;
            const int w = static_cast<int>(std::lround(circ / (2.0 * kPi)));
            if (w == 0) continue;
            bool near_marked = false;
            for (int dy = -1; dy <= 0 && !near_marked; ++dy)
                for (int dx = -1; dx <= 0; ++dx)
                    if (marked[static_cast<size_t>(iy + dy) * (n - 1) + (ix + dx)]) {
                        near_marked = true;
                        break;
                    }
            if (near_marked) continue;
            const size_t idx = static_cast<size_t>(iy) * (n - 1) + ix;
            winding[idx] = w;
            marked[idx] = 1;
        }
    }

    std::vector<Component> clusters = connected_components(marked, n - 1);
    std::vector<VortexCore> cores;
    for (const Component& c : clusters) {
        VortexCore core;
        int charge = 0;
        double best = std::numeric_limits<double>::infinity();
        int bx = 0, by = 0;
        for (int idx : c.pixels) {
            charge += winding[idx];
            const int ix = idx % (n - 1), iy = idx / (n - 1);
            double imin = std::numeric_limits<double>::infinity();
            for (int dy = 0; dy <= 1; ++dy)
                for (int dx = 0; dx <= 1; ++dx)
                    imin = std::min(imin, std::norm(field.at(ix + dx, iy + dy)));
            if (imin < best) {
                best = imin;
                bx = ix;
                by = iy;
            }
        }
        if (charge == 0) continue;  // dipole cancels within the cluster
        core.charge = charge;

        // Sub-pixel zero crossing: linearize the field over the darkest
        // plaquette, a(x,y) ~ c0 + cx x + cy y, and solve a = 0.
        const cplx a00 = field.at(bx, by);
        const cplx a10 = field.at(bx + 1, by);
        const cplx a01 = field.at(bx, by + 1);
        const cplx cx = a10 - a00;
        const cplx cy = a01 - a00;
        const double det = cx.real() * cy.imag() - cx.imag() * cy.real();
        double fx = 0.5, fy = 0.5;
        if (std::abs(det) > 1e-300) {
            fx = (-a00.real() * cy.imag() + a00.imag() * cy.real()) / det;
            fy = (-cx.real() * a00.imag() + cx.imag() * a00.real()) / det;
            fx = std::clamp(fx, -0.5, 1.5);
            fy = std::clamp(fy, -0.5, 1.5);
        }
        core.x = bx + fx;
        core.y = by + fy;
        cores.push_back(core);
    }
    return cores;
}

std::vector<VortexCore> find_vortices_frame(const Frame& frame, double beam_support_fraction,
                                            double prominence_sigmas) {
    if (!(beam_support_fraction > 0.0 && beam_support_fraction < 1.0))
        throw std::invalid_argument("find_vortices_frame: beam_support_fraction must be in (0,1)");
    if (!(prominence_sigmas > 0.0))
        throw std::invalid_argument("find_vortices_frame: prominence_sigmas must be positive");
    std::vector<VortexCore> cores;
    if (frame.counts.empty()) return cores;

    const int n = frame.pixels;
    const std::vector<double> img = smooth2(frame_intensity(frame), n);
    const double peak = *std::max_element(img.begin(), img.end());
    if (!(peak > 0.0)) return cores;
    const double thresh = beam_support_fraction * peak;

    // Fill the holes of the bright support: flood the below-threshold
    // region from the border; what remains unreachable is interior.
    std::vector<char> outside(img.size(), 0);
    std::queue<int> q;
    for (int x = 0; x < n; ++x) {
        for (int idx : {x, (n - 1) * n + x, x * n, x * n + (n - 1)}) {
            if (img[idx] < thresh && !outside[idx]) {
                outside[idx] = 1;
                q.push(idx);
            }
        }
    }
    while (!q.empty()) {
        const int idx = q.front();
        q.pop();
        const int x = idx % n, y = idx / n;
        const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
        for (const auto& [nx, ny] : nbr) {
            if (nx < 0 || ny < 0 || nx >= n || ny >= n) continue;
            const int nidx = ny * n + nx;
            if (img[nidx] < thresh && !outside[nidx]) {
                outside[nidx] = 1;
                q.push(nidx);
            }
        }
    }

    // Persistence watershed over the interior dark pixels: flood in
    // ascending intensity; a basin that meets a deeper one before gaining
    // min_prominence of depth is a sampling artifact and gets absorbed.
    std::vector<int> region;
    for (size_t idx = 0; idx < img.size(); ++idx)
        if (!outside[idx] && img[idx] < thresh) region.push_back(static_cast<int>(idx));
    std::sort(region.begin(), region.end(),
              [&img](int a, int b) { return img[a] != img[b] ? img[a] < img[b] : a < b; });

    std::vector<int> parent(img.size(), -1);  // -1 = not yet flooded
    auto find_root = [&parent](int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::vector<int> basin_min(img.size(), 0);  // per-root: darkest pixel
    std::vector<int> core_pixels;

    for (int idx : region) {
        parent[idx] = idx;
        basin_min[idx] = idx;
        const int x = idx % n, y = idx / n;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= n || ny >= n) continue;
                const int nidx = ny * n + nx;
                if (parent[nidx] < 0) continue;
                const int ra = find_root(idx), rb = find_root(nidx);
                if (ra == rb) continue;
                const bool a_deeper = img[basin_min[ra]] != img[basin_min[rb]]
                                          ? img[basin_min[ra]] < img[basin_min[rb]]
                                          : basin_min[ra] < basin_min[rb];
                const int deep = a_deeper ? ra : rb, shallow = a_deeper ? rb : ra;
                // A well is real when its depth at the merge saddle beats
                // the Poisson noise of the saddle counts.
                const double need = prominence_sigmas * std::sqrt(img[idx] + 1.0);
                if (img[idx] - img[basin_min[shallow]] >= need)
                    core_pixels.push_back(basin_min[shallow]);  // basin dies with real depth
                parent[shallow] = deep;
            }
    }
    std::vector<char> root_done(img.size(), 0);
    for (int idx : region) {
        const int r = find_root(idx);
        if (!root_done[r]) {
            root_done[r] = 1;
            core_pixels.push_back(basin_min[r]);  // surviving basin per dark pool
        }
    }

    for (int idx : core_pixels) {
        const int x = idx % n, y = idx / n;
        if (x < 1 || y < 1 || x + 1 >= n || y + 1 >= n) continue;
        // Paraboloid refinement from central differences.
        const double dx2 = img[idx + 1] - 2 * img[idx] + img[idx - 1];
        const double dy2 = img[idx + n] - 2 * img[idx] + img[idx - n];
        const double gx = 0.5 * (img[idx + 1] - img[idx - 1]);
        const double gy = 0.5 * (img[idx + n] - img[idx - n]);
        VortexCore core;
        core.x = x - (dx2 > 0 ? std::clamp(gx / dx2, -0.5, 0.5) : 0.0);
        core.y = y - (dy2 > 0 ? std::clamp(gy / dy2, -0.5, 0.5) : 0.0);
        core.charge = 1;  // sign unavailable from intensity alone
        core.frame_index = frame.index;
        cores.push_back(core);
    }
    return cores;
}

namespace {

// Exhaustive min-cost assignment of current cores to previous tracks.
// Fine for the <= 8 cores this pipeline sees.
std::vector<int> best_assignment(const std::vector<std::pair<double, double>>& prev,
                                 const std::vector<VortexCore>& cur) {
    const size_t m = cur.size();
    std::vector<int> perm(m);
    for (size_t i = 0; i < m; ++i) perm[i] = static_cast<int>(i);
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (size_t i = 0; i < m && i < prev.size(); ++i) {
            const double dx = cur[perm[i]].x - prev[i].first;
            const double dy = cur[perm[i]].y - prev[i].second;
            cost += dx * dx + dy * dy;
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TrackSet track_cores(const std::vector<std::vector<VortexCore>>& per_frame_cores) {
    TrackSet tracks;
    if (per_frame_cores.empty()) return tracks;
    for (const auto& frame : per_frame_cores)
        if (frame.empty()) throw std::invalid_argument("track_cores: frame with no cores");
    if (per_frame_cores[0].size() > 8)
        throw std::invalid_argument("track_cores: more than 8 cores unsupported");

    std::vector<std::pair<double, double>> last;
    size_t track_count = per_frame_cores[0].size();
    tracks.trajectories.resize(track_count);

    for (size_t f = 0; f < per_frame_cores.size(); ++f) {
        const auto& cores = per_frame_cores[f];
        if (cores.size() != track_count) {
            tracks.discontinuity = true;
            track_count = cores.size();
            tracks.trajectories.assign(track_count, {});
            last.clear();
        }
        std::vector<int> order(cores.size());
        if (last.empty()) {
            for (size_t i = 0; i < cores.size(); ++i) order[i] = static_cast<int>(i);
        } else {
            order = best_assignment(last, cores);
        }
        last.assign(cores.size(), {});
        for (size_t t = 0; t < cores.size(); ++t) {
            const VortexCore& c = cores[order[t]];
            tracks.trajectories[t].emplace_back(static_cast<int>(f), c.x, c.y);
            last[t] = {c.x, c.y};
        }
        std::vector<double> dists;
        for (size_t i = 0; i < cores.size(); ++i)
            for (size_t j = i + 1; j < cores.size(); ++j)
                dists.push_back(std::hypot(last[i].first - last[j].first,
                                           last[i].second - last[j].second));
        tracks.inter_core_distances.push_back(std::move(dists));
    }
    return tracks;
}

TipTiltResult tip_tilt(const std::vector<std::pair<double, double>>& positions, double length) {
    if (positions.size() < 2) throw std::invalid_argument("tip_tilt: need >= 2 samples");
    if (!(length > 0.0)) throw std::invalid_argument("tip_tilt: length must be positive");

    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : positions) {
        mx += x;
        my += y;
    }
    mx /= positions.size();
    my /= positions.size();

    TipTiltResult r;
    double r2sum = 0.0, rsum = 0.0;
    for (const auto& [x, y] : positions) {
        const double dx = x - mx, dy = y - my;
        r.theta_x.push_back(std::atan(dx / length));
        r.theta_y.push_back(std::atan(dy / length));
        const double rad = std::hypot(dx, dy);
        r2sum += rad * rad;
        rsum += rad;
    }
    r.radial_rms = std::sqrt(r2sum / positions.size());
    r.mean_radial = rsum / positions.size();
    return r;
}

}  // namespace uwoam
