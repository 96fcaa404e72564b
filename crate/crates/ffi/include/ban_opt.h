#ifndef BAN_OPT_H
#define BAN_OPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BanStatus {
  BAN_STATUS_OK = 0,
  BAN_STATUS_NULL_POINTER = 1,
  BAN_STATUS_INVALID_UTF8 = 2,
  BAN_STATUS_PARSE = 3,
  BAN_STATUS_PROMISE = 4,
  BAN_STATUS_CAP = 5,
  BAN_STATUS_OPEN_INPUTS = 6,
  BAN_STATUS_CYCLIC = 7,
  BAN_STATUS_UNKNOWN_NODE = 8,
  BAN_STATUS_INTERNAL = 9,
  BAN_STATUS_PANIC = 10,
} BanStatus;

/**
 * A parsed network file.
 */
typedef struct BanNetwork BanNetwork;

/**
 * Result of the optimization pipeline.
 */
typedef struct BanReport BanReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a network file. On success `*out` receives a new handle.
 *
 * # Safety
 * `text` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum BanStatus ban_network_parse(const char *text, struct BanNetwork **out);

/**
 * Releases a network handle; null is ignored.
 *
 * # Safety
 * `net` must come from this library and not be used afterwards.
 */
void ban_network_free(struct BanNetwork *net);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t ban_network_node_count(const struct BanNetwork *net);

/**
 * Number of declared inputs, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t ban_network_input_count(const struct BanNetwork *net);

/**
 * Prints the network in file format.
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer.
 */
enum BanStatus ban_network_to_string(const struct BanNetwork *net, char **out);

/**
 * JSON attractor report of the network, with its wires applied. `max_n`
 * caps the node count; 0 selects the default cap.
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer.
 */
enum BanStatus ban_network_attractors_json(const struct BanNetwork *net, size_t max_n, char **out);

/**
 * Output function of `node` in an acyclic module: the expression goes to
 * `*expr_out`, the delay to `*delay_out`.
 *
 * # Safety
 * `net` must be a live handle, `node` a nul-terminated string and both out
 * pointers valid.
 */
enum BanStatus ban_network_output_function(const struct BanNetwork *net,
                                           const char *node,
                                           char **expr_out,
                                           uint32_t *delay_out);

/**
 * Runs the optimization pipeline on the network with its wires applied.
 * With `verify`, attractors of both networks are compared when they have
 * at most `max_n` nodes (0 selects the default cap).
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer.
 */
enum BanStatus ban_optimize(const struct BanNetwork *net,
                            size_t max_n,
                            bool verify,
                            struct BanReport **out);

/**
 * Releases a report handle; null is ignored.
 *
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void ban_report_free(struct BanReport *report);

/**
 * Node count of the original network, or 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t ban_report_nodes_before(const struct BanReport *report);

/**
 * Node count of the optimized network, or 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t ban_report_nodes_after(const struct BanReport *report);

/**
 * Size of the cut set, or 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t ban_report_cut_size(const struct BanReport *report);

/**
 * 1 when the attractors were compared and matched, 0 when they differ,
 * -1 when they were not compared.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
int32_t ban_report_verified(const struct BanReport *report);

/**
 * JSON pipeline report.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum BanStatus ban_report_json(const struct BanReport *report, char **out);

/**
 * The optimized network as a new handle.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum BanStatus ban_report_optimized(const struct BanReport *report, struct BanNetwork **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ban_string_free(char *s);

/**
 * Description of the last failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ban_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BAN_OPT_H */
