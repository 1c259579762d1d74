#ifndef SPECSLICE_H
#define SPECSLICE_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPECSLICE_BUILDING)
#define SS_API __attribute__((visibility("default")))
#else
#define SS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
  SS_OK = 0,
  SS_ERR_CONFIG = 1,
  SS_ERR_DATA = 2,
  SS_ERR_NUMERIC = 3,
  SS_ERR_UNDEFINED = 4,
  SS_ERR_INTERNAL = 5
} ss_status;

typedef struct ss_graph ss_graph;
typedef struct ss_dictionary ss_dictionary;

/* Per-thread diagnostics for the last failing call on this thread. */
SS_API const char* ss_last_error(void);
SS_API const char* ss_last_stage(void);

/* Process exit code for a status: 0 ok, 1 config, 2 data, 3 numeric. */
SS_API int ss_exit_code(ss_status status);
SS_API const char* ss_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
SS_API void ss_string_free(char* s);

/* Newline separated "key<TAB>help" lines for every config key. */
SS_API const char* ss_config_keys(void);

/* Runs restructure | metrics | gen | oracle-compare | expressive with a
   key=value config text; *json_out receives the summary document. */
SS_API ss_status ss_run(const char* command, const char* config_text, char** json_out);

/* Graphs. Optional paths may be NULL. */
SS_API ss_status ss_graph_load(const char* edge_path, const char* feature_path, const char* label_path,
                               const char* split_path, ss_graph** out);
SS_API ss_status ss_graph_generate_er(size_t n, double p, int num_classes, uint64_t seed, int self_loops,
                                      ss_graph** out);
SS_API ss_status ss_graph_generate_sbm(const size_t* sizes, size_t num_classes, double p_intra, double p_inter,
                                       uint64_t seed, ss_graph** out);
SS_API ss_status ss_graph_generate_grid(size_t width, size_t height, ss_graph** out);
SS_API void ss_graph_free(ss_graph* g);
SS_API size_t ss_graph_num_nodes(const ss_graph* g);
SS_API size_t ss_graph_num_edges(const ss_graph* g);
SS_API ss_status ss_graph_save_edges(const ss_graph* g, const char* path);

/* mask: all | train | val | test | train_val.
   metric: edge | node | norm | density. */
SS_API ss_status ss_graph_metric(const ss_graph* g, const char* metric, const char* mask, double* out);
SS_API ss_status ss_graph_report(const ss_graph* g, const char* mask, char** json_out);

/* Slicer scalars. */
SS_API double ss_slicer_response(double s, double a, int m, double eps_hat, double lambda);
SS_API double ss_min_eps_hat(double s, int m);
SS_API size_t ss_jl_min_samples(double n_nodes, double eps, double beta);

/* Dictionaries over the default 20-slicer bank, or a bank described by
   bank_config (key=value text using the s, m, eps_hat, p, kind, solver and
   bank_count keys; NULL for defaults). */
SS_API ss_status ss_dictionary_build(const ss_graph* g, size_t eta, uint64_t seed, const char* bank_config,
                                     ss_dictionary** out);
SS_API ss_status ss_dictionary_load(const char* path, ss_dictionary** out);
SS_API ss_status ss_dictionary_save(const ss_dictionary* d, const char* path);
SS_API void ss_dictionary_free(ss_dictionary* d);
SS_API size_t ss_dictionary_rows(const ss_dictionary* d);
SS_API size_t ss_dictionary_cols(const ss_dictionary* d);
/* Copies the row-major matrix; capacity is in doubles. */
SS_API ss_status ss_dictionary_copy(const ss_dictionary* d, double* buffer, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif
