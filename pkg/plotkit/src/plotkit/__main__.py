from plotkit.cli import main

raise SystemExit(main())
