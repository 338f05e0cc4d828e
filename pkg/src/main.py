import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

# --- Настройка путей для импорта ---
current_dir = Path(__file__).resolve().parent.parent
sys.path.append(str(current_dir))

from config.settings import Config
from src.attacks.report import AttackScenario, run_attack_suite, summarize, write_attack_report
from src.classifier.kde import kde_classify
from src.crypto.encoding import pack_blobs, unpack_blobs
from src.crypto.fixedpoint import FixedPointParams
from src.crypto.paillier import PublicKey, SecretKey, keygen
from src.harness.benchmark import format_benchmark, run_benchmark
from src.harness.comparator import compare
from src.harness.data_loader import DatasetSchema, load_csv, load_preset
from src.harness.experiment_config import ExperimentConfig
from src.harness.report_generator import ComparisonReportGenerator
from src.harness.report_store import ReportStore
from src.protocol.messages import Message
from src.protocol.parties import DataOwner, EncryptedTuple
from src.protocol.session import ProtocolSession, SessionConfig
from src.utils.errors import PrivateKdeError
from src.utils.logger import logger, set_level
from src.utils.rng import RandomSource

PUBLIC_KEY_FILE = "public.key"
SECRET_KEY_FILE = "secret.key"
STORE_FILE = "store.bin"
PARAMS_FILE = "params.json"


class UsageError(Exception):
    """Неверная комбинация аргументов (код выхода 2)"""


# --- Вспомогательные ---

def _parse_vector(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(',') if x.strip()]
    except ValueError:
        raise UsageError(f"Ожидался список чисел через запятую: '{text}'")


def _fixed_point(key_bits: int, m: int, c: int, sigma: Optional[float] = None,
                 overrides: Optional[Dict] = None) -> FixedPointParams:
    """Параметры по умолчанию; для ключей короче KEY_BITS - урезанный набор"""
    values = {} if key_bits >= Config.KEY_BITS else dict(Config.FIXED_POINT_REDUCED)
    if sigma is not None:
        values['sigma'] = sigma
    values.update(overrides or {})
    return FixedPointParams.for_key(key_bits, m, c, **values)


def _load_keys(key_dir: Path, need_secret: bool = True):
    key_dir = Path(key_dir)
    pk = PublicKey.from_bytes((key_dir / PUBLIC_KEY_FILE).read_bytes())
    sk = SecretKey.from_bytes((key_dir / SECRET_KEY_FILE).read_bytes()) if need_secret else None
    return pk, sk


def _load_dataset(args, config: Optional[ExperimentConfig] = None, test_fraction: Optional[float] = None):
    name = args.dataset
    seed = args.seed
    data_dir = getattr(args, 'data_dir', None) or (config.data_dir if config else None)
    if name in Config.DATASET_PRESETS:
        return load_preset(name, data_dir=Path(data_dir) if data_dir else None, seed=seed,
                           test_fraction=test_fraction)
    schema = DatasetSchema()
    if config is not None:
        schema = DatasetSchema(label_column=config.label_column, header=config.header)
    elif getattr(args, 'header', False):
        schema = DatasetSchema(header=True)
    return load_csv(name, schema, test_fraction, seed)


# --- Подкоманды ---

def cmd_keygen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pk, sk = keygen(args.bits, seed=args.seed)
    (out / PUBLIC_KEY_FILE).write_bytes(pk.to_bytes())
    (out / SECRET_KEY_FILE).write_bytes(sk.to_bytes())
    print(f"key_id={pk.key_id} bits={pk.key_bits} dir={out}")
    return 0


def cmd_outsource(args) -> int:
    """Шифрует CSV силами владельцев данных и сохраняет хранилище DataHost"""
    pk, _ = _load_keys(args.keys, need_secret=False)
    loaded = _load_dataset(args, test_fraction=0.0)
    data = loaded.train
    params = _fixed_point(pk.key_bits, data.m, data.c, args.sigma)
    params.check_modulus(pk.n)

    rng = RandomSource(args.seed)
    owners = [DataOwner(f"owner-{i}", pk, params, rng.spawn(f"owner-{i}")) for i in range(max(1, args.owners))]
    blobs = [owners[i % len(owners)].submit_tuple(t).to_message().encode() for i, t in enumerate(data.tuples)]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / STORE_FILE).write_bytes(pack_blobs(blobs))
    with open(out / PARAMS_FILE, 'w', encoding='utf-8') as f:
        json.dump(params.to_dict(), f, indent=2)
    logger.info(f"📤 Зашифровано {len(blobs)} кортежей -> {out}")
    print(f"tuples={len(blobs)} m={data.m} c={data.c} dir={out}")
    return 0


def cmd_query(args) -> int:
    q = _parse_vector(args.q)
    if args.store:
        if not args.keys:
            raise UsageError("Для --store нужен --keys")
        pk, sk = _load_keys(args.keys)
        store_dir = Path(args.store)
        with open(store_dir / PARAMS_FILE, 'r', encoding='utf-8') as f:
            params = FixedPointParams.from_dict(json.load(f))
        config = SessionConfig(params=params, keys=(pk, sk), seed=args.seed, transport=args.transport)
        with ProtocolSession(config) as session:
            for blob in unpack_blobs((store_dir / STORE_FILE).read_bytes()):
                session.data_host.upload(EncryptedTuple.from_message(Message.decode(blob), pk))
            label = session.query(q)
        print(f"label={label}")
        return 0

    if not args.dataset:
        raise UsageError("Нужен --store или --dataset")
    data = _load_dataset(args, test_fraction=0.0).train
    key_bits = args.bits or Config.KEY_BITS
    params = _fixed_point(key_bits, data.m, data.c, args.sigma)
    config = SessionConfig(dataset=data, query=q, params=params, key_bits=key_bits,
                           seed=args.seed, transport=args.transport)
    with ProtocolSession(config) as session:
        session.outsource(data)
        label = session.query(q)
    expected = kde_classify(data, q, params.sigma)
    print(f"label={label} plaintext={expected} match={label == expected}")
    return 0


def cmd_attack(args) -> int:
    if args.seed is None:
        raise UsageError("attack требует --seed для воспроизводимости")
    dims = [int(x) for x in _parse_vector(args.m)]
    ks = [int(x) for x in _parse_vector(args.k)]
    scenarios = [AttackScenario(mode=args.mode, k=k, m=m, n_classes=args.classes, sigma=args.sigma,
                                deletion=not args.no_deletion)
                 for m in dims for k in ks]
    df = run_attack_suite(scenarios, instances=args.instances, epsilon=args.epsilon, seed=args.seed)
    path = write_attack_report(df, Path(args.out) if args.out else None)
    if args.db:
        with ReportStore(args.db) as store:
            store.save_attacks(df, run_id=f"attack-{args.mode}-seed{args.seed}")
    print(summarize(df).to_string(index=False))
    print(f"report={path}")
    return 0


def cmd_compare(args) -> int:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    config = config.with_overrides(
        dataset=args.dataset, seed=args.seed, k=args.k, sigma=args.sigma, key_bits=args.bits,
        algorithms=args.algorithms.split(',') if args.algorithms else None,
        kernel=args.kernel, protocol=True if args.protocol else None, output=args.out,
        data_dir=args.data_dir,
    )
    if config.seed is None:
        raise UsageError("compare требует --seed (или seed в файле конфигурации)")
    if not config.dataset:
        raise UsageError("Не задан набор данных (--dataset)")
    args.dataset, args.seed = config.dataset, config.seed

    data = _load_dataset(args, config, test_fraction=config.test_fraction)
    name = config.dataset if config.dataset in Config.DATASET_PRESETS else Path(config.dataset).stem
    report = compare(data, config, name=name)
    path = ComparisonReportGenerator.write([report], Path(config.output) if config.output else None)
    if args.db:
        with ReportStore(args.db) as store:
            store.save_comparison(report.to_frame(), run_id=f"{name}-seed{config.seed}")
    print(ComparisonReportGenerator.render([report]), end='')
    print(f"report={path}")
    return 0


def cmd_bench(args) -> int:
    df = run_benchmark(key_bits=args.bits, seed=args.seed, n=args.n, m=args.m,
                       repeats=args.repeats, transport=args.transport)
    print(format_benchmark(df), end='')
    return 0


# --- Разбор аргументов ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pkde", description="Приватная классификация KDE и атаки на k-NN")
    parser.add_argument('--seed', type=int, default=Config.DEFAULT_SEED,
                        help="seed тестового режима (воспроизводимость), по умолчанию PKDE_SEED")
    parser.add_argument('--db', default=None, help="SQLite-файл для сохранения результатов")
    parser.add_argument('--log-level', default=None, help="DEBUG / INFO / WARNING / ERROR")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('keygen', help="сгенерировать пару ключей Paillier")
    p.add_argument('--bits', type=int, default=None)
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser('outsource', help="зашифровать набор данных для DataHost")
    p.add_argument('--dataset', required=True, help="пресет или путь к CSV")
    p.add_argument('--data-dir', default=None)
    p.add_argument('--header', action='store_true')
    p.add_argument('--keys', required=True)
    p.add_argument('--sigma', type=float, default=None)
    p.add_argument('--owners', type=int, default=1)
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_outsource)

    p = sub.add_parser('query', help="зашифрованный запрос к KDE-классификатору")
    p.add_argument('--q', required=True, help="признаки через запятую, в [0, 1]")
    p.add_argument('--store', default=None)
    p.add_argument('--keys', default=None)
    p.add_argument('--dataset', default=None)
    p.add_argument('--data-dir', default=None)
    p.add_argument('--header', action='store_true')
    p.add_argument('--bits', type=int, default=None)
    p.add_argument('--sigma', type=float, default=None)
    p.add_argument('--transport', choices=['inprocess', 'tcp'], default=None)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser('attack', help="атаки обучения расстояний")
    p.add_argument('--mode', choices=['1nn', 'all_labels', 'majority', 'plaintext', 'kde'], default='1nn')
    p.add_argument('--k', default='1', help="значения k через запятую")
    p.add_argument('--m', default='2', help="размерности через запятую")
    p.add_argument('--classes', type=int, default=2)
    p.add_argument('--sigma', type=float, default=Config.FIXED_POINT['sigma'])
    p.add_argument('--instances', type=int, default=20)
    p.add_argument('--epsilon', type=float, default=None)
    p.add_argument('--no-deletion', action='store_true', help="оракул без удаления вставленных кортежей")
    p.add_argument('--out', default=None)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser('compare', help="сравнение k-NN и KDE")
    p.add_argument('--config', default=None, help=".json / .yaml файл эксперимента")
    p.add_argument('--dataset', default=None)
    p.add_argument('--data-dir', default=None)
    p.add_argument('--algorithms', default=None, help="например knn,kde,uniform")
    p.add_argument('--kernel', choices=['gaussian', 'logistic'], default=None)
    p.add_argument('--k', type=int, default=None)
    p.add_argument('--sigma', type=float, default=None)
    p.add_argument('--protocol', action='store_true', help="сверить часть запросов с протоколом")
    p.add_argument('--bits', type=int, default=None)
    p.add_argument('--out', default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser('bench', help="замеры времени по фазам")
    p.add_argument('--bits', type=int, default=None)
    p.add_argument('--n', type=int, default=20)
    p.add_argument('--m', type=int, default=2)
    p.add_argument('--repeats', type=int, default=5)
    p.add_argument('--transport', choices=['inprocess', 'tcp'], default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.log_level:
            try:
                set_level(args.log_level)
            except ValueError as e:
                raise UsageError(str(e))
        Config.setup_directories()
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: ошибка: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        logger.info("Программа остановлена")
        return 1
    except (PrivateKdeError, ValueError, OSError) as e:
        logger.error(f"❌ {args.command}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
