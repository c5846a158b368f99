#pragma once

#include <string>

#include "mc/fsutil.hpp"

namespace mc {

// Helper header compiled into timed loop variants. Record destination is read
// from $MC_PROFILE_OUT on first use; absent/empty means no-op.
inline const char* mc_profile_header_text() {
  return R"raw(#ifndef MC_PROFILE_H
#define MC_PROFILE_H
#ifndef _POSIX_C_SOURCE
#define _POSIX_C_SOURCE 200809L
#endif
#include <stdio.h>
#include <stdlib.h>
#include <time.h>

static FILE *mc_profile_out_file(void) {
  static FILE *fp = NULL;
  static int tried = 0;
  if (!tried) {
    const char *path;
    tried = 1;
    path = getenv("MC_PROFILE_OUT");
    if (path && path[0]) fp = fopen(path, "a");
  }
  return fp;
}

static void mc_profile_record(const char *loop_id, const struct timespec *t0,
                              const struct timespec *t1) {
  FILE *f = mc_profile_out_file();
  long long ns;
  if (!f) return;
  ns = (long long)(t1->tv_sec - t0->tv_sec) * 1000000000LL +
       (long long)(t1->tv_nsec - t0->tv_nsec);
  if (ns < 0) ns = 0;
  fprintf(f, "MC\t%s\t%llu\n", loop_id, (unsigned long long)ns);
  fflush(f);
}
#endif
)raw";
}

// Marker shim for energy instrumentation. No-ops unless MC_ENERGY_PERFMON is
// defined, in which case the markers forward to the LIKWID marker API. The
// weak state object is shared across translation units so INIT/CLOSE stay
// idempotent when several loop files run in one process. Setting
// MC_MARKER_TRACE to a path logs every marker call for test harnesses.
inline const char* mc_markers_header_text() {
  return R"raw(#ifndef MC_MARKERS_H
#define MC_MARKERS_H
#include <stdio.h>
#include <stdlib.h>

#ifdef MC_ENERGY_PERFMON
#include <likwid.h>
#endif

struct mc_marker_state_t {
  int init_done;
  int close_done;
};
__attribute__((weak)) struct mc_marker_state_t mc_marker_state;

static void mc_marker_trace(const char *what, const char *id) {
  static FILE *fp = NULL;
  static int tried = 0;
  if (!tried) {
    const char *path;
    tried = 1;
    path = getenv("MC_MARKER_TRACE");
    if (path && path[0]) fp = fopen(path, "a");
  }
  if (!fp) return;
  if (id)
    fprintf(fp, "%s\t%s\n", what, id);
  else
    fprintf(fp, "%s\n", what);
  fflush(fp);
}

static void mc_marker_init_impl(void) {
  mc_marker_trace("INIT", 0);
  if (mc_marker_state.init_done) return;
  mc_marker_state.init_done = 1;
#ifdef MC_ENERGY_PERFMON
  LIKWID_MARKER_INIT;
#endif
}

static void mc_marker_start_impl(const char *id) {
  mc_marker_trace("START", id);
#ifdef MC_ENERGY_PERFMON
  LIKWID_MARKER_START(id);
#endif
}

static void mc_marker_stop_impl(const char *id) {
  mc_marker_trace("STOP", id);
#ifdef MC_ENERGY_PERFMON
  LIKWID_MARKER_STOP(id);
#endif
}

#ifdef MC_ENERGY_PERFMON
static void mc_marker_close_at_exit(void) { LIKWID_MARKER_CLOSE; }
#endif

static void mc_marker_close_impl(void) {
  mc_marker_trace("CLOSE", 0);
  if (mc_marker_state.close_done) return;
  mc_marker_state.close_done = 1;
#ifdef MC_ENERGY_PERFMON
  atexit(mc_marker_close_at_exit);
#endif
}

#define MC_MARKER_INIT mc_marker_init_impl()
#define MC_MARKER_START(id) mc_marker_start_impl(id)
#define MC_MARKER_STOP(id) mc_marker_stop_impl(id)
#define MC_MARKER_CLOSE mc_marker_close_impl()
#endif
)raw";
}

// Writes both support headers into dir; returns dir for -I use.
inline fs::path write_support_headers(const fs::path& dir) {
  write_file(dir / "mc_profile.h", mc_profile_header_text());
  write_file(dir / "mc_markers.h", mc_markers_header_text());
  return dir;
}

}  // namespace mc
