from relaycast.cli import main as cli_main
from relaycast.env_loader import load_dotenv_if_present


def main() -> None:
    load_dotenv_if_present()
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
