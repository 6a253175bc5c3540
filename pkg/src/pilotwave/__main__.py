from pilotwave.cli import main

raise SystemExit(main())
