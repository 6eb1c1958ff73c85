use daspec::daspec::{has_no_sign_change, select_and_label};
use daspec::io::{read_dataset, write_dataset};
use daspec::linalg::eigendecompose;
use daspec::{cluster, kernel_matrix, label_agreement, DaSpecParams, DataSet, KernelSpec, SymMatrix};
use proptest::prelude::*;

fn points(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 2..max_n)
}

fn symmetric(max_n: usize) -> impl Strategy<Value = SymMatrix> {
    (1..max_n).prop_flat_map(|n| {
        prop::collection::vec(-10.0f64..10.0, n * n).prop_map(move |raw| {
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] = raw[i.min(j) * n + i.max(j)];
                }
            }
            SymMatrix::from_row_major(n, a).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigendecomposition_reconstructs(m in symmetric(24)) {
        let eig = eigendecompose(&m).unwrap();
        let scale = m.as_slice().iter().fold(1.0f64, |a, v| a.max(v.abs()));
        prop_assert!(eig.reconstruction_error(&m) <= 1e-10 * scale * m.dim() as f64);
        prop_assert!(eig.orthonormality_error() <= 1e-10 * m.dim() as f64);
        prop_assert!(eig.values().windows(2).all(|w| w[0] >= w[1]));
        for v in eig.vectors() {
            // largest-magnitude entry is positive
            let big = v.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            prop_assert!(big > 0.0);
        }
    }

    #[test]
    fn clustering_is_permutation_equivariant(rows in points(40), rot in 0usize..40) {
        let data = DataSet::from_rows(&rows).unwrap();
        let n = rows.len();
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let shuffled = data.select(&perm);
        let params = DaSpecParams::default().with_bandwidth(0.7);
        let a = cluster(&data, &params).unwrap();
        // tied eigenvalues leave the eigenbasis, and so the selection, arbitrary
        let eig = eigendecompose(&kernel_matrix(a.kernel(), &data).unwrap()).unwrap();
        prop_assume!(eig.values().windows(2).all(|w| (w[0] - w[1]).abs() > 1e-9));
        let b = cluster(&shuffled, &params).unwrap();
        prop_assert_eq!(a.g_hat, b.g_hat);
        let permuted: Vec<usize> = perm.iter().map(|&i| a.labels[i]).collect();
        prop_assert_eq!(label_agreement(&permuted, &b.labels).unwrap(), 1.0);
    }

    #[test]
    fn selection_ignores_eigenvector_signs(rows in points(30), flips in prop::collection::vec(any::<bool>(), 30)) {
        let data = DataSet::from_rows(&rows).unwrap();
        let spec = KernelSpec::gaussian(0.6).unwrap();
        let m = kernel_matrix(&spec, &data).unwrap();
        let base = cluster(&data, &DaSpecParams::default().with_bandwidth(0.6)).unwrap();
        let eig = eigendecompose(&m).unwrap();
        for (j, v) in eig.vectors().enumerate() {
            let flipped: Vec<f64> = v.iter().map(|x| if flips[j % flips.len()] { -x } else { *x }).collect();
            let eps = v.iter().fold(0.0f64, |a, x| a.max(x.abs())) / v.len() as f64;
            prop_assert_eq!(has_no_sign_change(v, eps), has_no_sign_change(&flipped, eps));
        }
        let again = select_and_label(&eig, base.params_used).unwrap();
        prop_assert_eq!(again.labels, base.labels);
    }

    #[test]
    fn csv_round_trip(rows in points(20), labels in prop::collection::vec(1usize..5, 20)) {
        let n = rows.len();
        let data = DataSet::from_rows(&rows).unwrap().with_labels(labels[..n].to_vec()).unwrap();
        let mut buf = Vec::new();
        write_dataset(&data, &mut buf).unwrap();
        prop_assert_eq!(read_dataset(buf.as_slice()).unwrap(), data);
    }

    #[test]
    fn report_json_round_trip(rows in points(25)) {
        let data = DataSet::from_rows(&rows).unwrap();
        let report = daspec::cli::cluster_report(&data, &DaSpecParams::default().with_bandwidth(1.0), false).unwrap();
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: daspec::cli::ClusterReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
        prop_assert_eq!(back, report);
    }

    #[test]
    fn labels_in_range(rows in points(40), w in 0.1f64..3.0) {
        let data = DataSet::from_rows(&rows).unwrap();
        let fit = cluster(&data, &DaSpecParams::default().with_bandwidth(w)).unwrap();
        prop_assert!(fit.g_hat >= 1);
        prop_assert!(fit.labels.iter().all(|&l| (1..=fit.g_hat).contains(&l)));
        prop_assert!(fit.selected.windows(2).all(|s| s[0].index < s[1].index));
    }
}
