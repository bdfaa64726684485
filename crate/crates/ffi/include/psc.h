#ifndef PSC_H
#define PSC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Which simulator executes a scenario.
 */
typedef enum PscBackend {
  PSC_BACKEND_ENGINE = 0,
  PSC_BACKEND_ORACLE = 1,
  PSC_BACKEND_BOTH = 2,
} PscBackend;

/*
 Result of every fallible call. Zero is success.
 */
typedef enum PscStatus {
  PSC_STATUS_OK = 0,
  PSC_STATUS_NULL_POINTER,
  PSC_STATUS_INVALID_UTF8,
  PSC_STATUS_INVALID_ARGUMENT,
  PSC_STATUS_PANIC,
  PSC_STATUS_PARSE,
  PSC_STATUS_UNKNOWN_QUBIT,
  PSC_STATUS_DUPLICATE_QUBIT,
  PSC_STATUS_DUPLICATE_POSITION,
  PSC_STATUS_NON_PLANAR_EMBEDDING,
  PSC_STATUS_BAD_DEGREE,
  PSC_STATUS_ANGLE_TIE,
  PSC_STATUS_SLOT_COLLISION,
  PSC_STATUS_DISCONNECTED,
  PSC_STATUS_EULER_VIOLATION,
  PSC_STATUS_LINK_ABSENT,
  PSC_STATUS_CORNERS_PAIRED,
  PSC_STATUS_NOT_ADJACENT,
  PSC_STATUS_NO_SHARED_PLAQUETTE,
  PSC_STATUS_NOT_UNPAIRED,
  PSC_STATUS_SLOT_MISSING,
  PSC_STATUS_INVALID_PATH,
  PSC_STATUS_SEGMENT_NOT_ON_FACE,
  PSC_STATUS_NON_SIMPLE_LOOP,
  PSC_STATUS_NOT_A_LOOP,
  PSC_STATUS_ODD_OPEN_PATH,
  PSC_STATUS_NON_HERMITIAN_AXIS,
  PSC_STATUS_NON_HERMITIAN_OBSERVABLE,
  PSC_STATUS_NON_COMMUTING,
  PSC_STATUS_RANK_DEFICIENT,
  PSC_STATUS_INCONSISTENT,
  PSC_STATUS_QUBIT_COUNT_MISMATCH,
  PSC_STATUS_TOO_MANY_QUBITS,
  PSC_STATUS_VALIDATION_FAILED,
  PSC_STATUS_UNSUPPORTED_GEOMETRY,
  PSC_STATUS_ENDPOINT_MISMATCH,
  PSC_STATUS_UNKNOWN_ANYON,
  PSC_STATUS_BACKEND_DIVERGENCE,
  PSC_STATUS_IO,
} PscStatus;

/*
 Opaque surface graph.
 */
typedef struct PscGraph PscGraph;

/*
 Opaque protocol machine on the stabilizer engine.
 */
typedef struct PscMachine PscMachine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, empty after a success. The
 pointer stays valid until the next call into the library on this thread.
 */
const char *psc_last_error(void);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void psc_string_free(char *s);

/*
 Build a graph from its text form.

 # Safety
 `text_ptr` must be a NUL-terminated string; `out` must be writable.
 */
enum PscStatus psc_graph_parse(const char *text_ptr, struct PscGraph **out);

/*
 Surface code patch with `cols × rows` qubits.

 # Safety
 `out` must be writable.
 */
enum PscStatus psc_graph_surface_code(uint32_t cols, uint32_t rows, struct PscGraph **out);

/*
 # Safety
 `g` must be null or a handle from this library, not yet freed.
 */
void psc_graph_free(struct PscGraph *g);

/*
 Qubit, stabilizer and unpaired-corner counts.

 # Safety
 `g` must be a live handle and the outputs writable.
 */
enum PscStatus psc_graph_counts(const struct PscGraph *g,
                                uintptr_t *n_qubits,
                                uintptr_t *n_stabilizers,
                                uintptr_t *n_sigma);

/*
 Check the counting balance and that a Kasteleyn orientation exists.

 # Safety
 `g` must be a live handle.
 */
enum PscStatus psc_graph_verify(const struct PscGraph *g);

/*
 Normalized text form of the graph.

 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum PscStatus psc_graph_to_text(const struct PscGraph *g, char **out);

/*
 Pauli string (`±1|XZ..` form) of the stabilizer on the labelled face.

 # Safety
 `g` must be a live handle, `face` a NUL-terminated string, `out` writable.
 */
enum PscStatus psc_compile_stabilizer(const struct PscGraph *g, const char *face, char **out);

/*
 Pauli string of the Wilson line along a route such as `0/W,1,2/E`.

 # Safety
 `g` must be a live handle, `route` a NUL-terminated string, `out` writable.
 */
enum PscStatus psc_compile_line(const struct PscGraph *g, const char *route, char **out);

/*
 Gate list of exp(∓iπ/4 P) for `sign` = +1 or −1: a `phase k/4` line
 followed by one gate per line.

 # Safety
 `pauli` must be a NUL-terminated string; `out` must be writable.
 */
enum PscStatus psc_rotation_gates(const char *pauli, int sign, char **out);

/*
 Run scenario text and return the measurement record as JSON. A negative
 `seed` keeps the scenario's own seed. Graph files named by `load` resolve
 against the working directory.

 # Safety
 `scenario` must be a NUL-terminated string; `out` must be writable.
 */
enum PscStatus psc_run_scenario(const char *scenario,
                                enum PscBackend backend,
                                int64_t seed,
                                char **out);

/*
 Machine on a copy of `g`, prepared in the code state with every free
 logical fixed by measurement under `seed`.

 # Safety
 `g` must be a live handle; `out` must be writable.
 */
enum PscStatus psc_machine_new(const struct PscGraph *g, uint64_t seed, struct PscMachine **out);

/*
 # Safety
 `m` must be null or a handle from this library, not yet freed.
 */
void psc_machine_free(struct PscMachine *m);

/*
 Create anyons `a` and `b` by cutting the link between qubits `q1` and `q2`.

 # Safety
 `m` must be a live handle; names must be NUL-terminated strings.
 */
enum PscStatus psc_machine_create(struct PscMachine *m,
                                  const char *a,
                                  const char *b,
                                  uint32_t q1,
                                  uint32_t q2);

/*
 Move anyon `name` onto the corner `target` (`id/slot`).

 # Safety
 `m` must be a live handle; strings must be NUL-terminated.
 */
enum PscStatus psc_machine_move(struct PscMachine *m, const char *name, const char *target);

/*
 Exchange anyons `a` and `b` counter-clockwise, or clockwise when `inverse`.

 # Safety
 `m` must be a live handle; names must be NUL-terminated strings.
 */
enum PscStatus psc_machine_braid(struct PscMachine *m, const char *a, const char *b, bool inverse);

/*
 Measure the Wilson line between `a` and `b`: the tracked line, or with
 `initial` the line along the creation path.

 # Safety
 `m` must be a live handle; names NUL-terminated; `outcome` writable.
 */
enum PscStatus psc_machine_measure_wilson(struct PscMachine *m,
                                          const char *a,
                                          const char *b,
                                          bool initial,
                                          int *outcome);

/*
 Fuse `a` with `b`; the outcome is +1 for vacuum and −1 for a fermion.

 # Safety
 `m` must be a live handle; names NUL-terminated; `outcome` writable.
 */
enum PscStatus psc_machine_fuse(struct PscMachine *m, const char *a, const char *b, int *outcome);

/*
 Whether every stabilizer currently has expectation +1.

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum PscStatus psc_machine_flux_free(const struct PscMachine *m, bool *out);

/*
 Structure hash of the machine's current graph.

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum PscStatus psc_machine_graph_hash(const struct PscMachine *m, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSC_H */
